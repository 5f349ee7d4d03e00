//! Seeded property batteries behind `screwspec verify`.
//!
//! Every suite reports one line per property: the worst value seen over the
//! sample and the limit it is held to. The limits can be overridden at run
//! time through the `SCREWSPEC_TOL` environment variable, which is how the
//! failure path of the CLI is exercised.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geodesic::{geodesic_lie, horizontality_check, GeodesicSpec, ScrewConfig};
use crate::helix::{
    cot_k, kappa_tau_from_axis, kappa_tau_from_generator, radial_translation, standard_helix_generator,
    unit_speed_axis_speed, AxisHelix, ComplexLength, HelixType,
};
use crate::oracle::{classical_helix, finite_difference_frenet, geometric_frame, matrix_w};
use crate::samples::RUNS;
use crate::spaceform::{algebra_from_parts, exp_at, phi, Mat3, SpaceForm, Vec3, Vec4};
use crate::spectrum::{full_spectrum, helix_witness, model_spectrum, verify_entry, EnumerationBudget, VerifyTolerances};

pub const TOL_ENV: &str = "SCREWSPEC_TOL";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Suite {
    Horizontality,
    Frenet,
    Equivalence,
    Closing,
}

impl Suite {
    pub const ALL: [Suite; 4] = [Suite::Horizontality, Suite::Frenet, Suite::Equivalence, Suite::Closing];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Horizontality => "horizontality",
            Suite::Frenet => "frenet",
            Suite::Equivalence => "equivalence",
            Suite::Closing => "closing",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Limits for every property. `margin`-type checks (primitivity) are lower
/// bounds and are not affected by [`Tolerances::uniform`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub horizontal: f64,
    pub speed: f64,
    pub equivalence: f64,
    pub frenet_relative: f64,
    pub classical: f64,
    pub matrix_w: f64,
    pub curvature_relative: f64,
    pub verify: VerifyTolerances,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            horizontal: 1e-6,
            speed: 1e-6,
            equivalence: 1e-9,
            frenet_relative: 1e-4,
            classical: 1e-12,
            matrix_w: 1e-12,
            curvature_relative: 1e-10,
            verify: VerifyTolerances::default(),
        }
    }
}

impl Tolerances {
    pub fn uniform(tol: f64) -> Self {
        Tolerances {
            horizontal: tol,
            speed: tol,
            equivalence: tol,
            frenet_relative: tol,
            classical: tol,
            matrix_w: tol,
            curvature_relative: tol,
            verify: VerifyTolerances::uniform(tol),
        }
    }

    /// Defaults, or a uniform limit taken from `SCREWSPEC_TOL` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var(TOL_ENV) {
            Err(_) => Ok(Tolerances::default()),
            Ok(s) => {
                let t: f64 = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("{TOL_ENV}={s:?} is not a number")))?;
                if !(t > 0.0 && t.is_finite()) {
                    return Err(Error::Parse(format!("{TOL_ENV} must be positive, got {t}")));
                }
                Ok(Tolerances::uniform(t))
            }
        }
    }
}

/// Worst observed value of one property.
#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub suite: Suite,
    pub name: String,
    pub value: f64,
    pub limit: f64,
    /// `true` when `value` must stay below `limit`, `false` for margins.
    pub upper: bool,
    pub passed: bool,
}

impl Property {
    pub fn upper(suite: Suite, name: impl Into<String>, value: f64, limit: f64) -> Self {
        Property { suite, name: name.into(), value, limit, upper: true, passed: value < limit }
    }

    pub fn lower(suite: Suite, name: impl Into<String>, value: f64, limit: f64) -> Self {
        Property { suite, name: name.into(), value, limit, upper: false, passed: value > limit }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let op = if self.upper { "<" } else { ">" };
        write!(f, "{verdict} {}/{}: {:.3e} {op} {:.1e}", self.suite, self.name, self.value, self.limit)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SuiteReport {
    pub properties: Vec<Property>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(|p| p.passed)
    }
}

// ---------------------------------------------------------------------------
// Sampling

/// Screw structure together with the Frenet data of a geodesic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScrewSample {
    pub cfg: ScrewConfig,
    pub kappa: f64,
    pub tau: f64,
}

fn random_space_form(rng: &mut impl Rng) -> SpaceForm {
    SpaceForm::ALL[rng.random_range(0..3)]
}

/// `count` tuples with `k` uniform in `{0, 1, −1}`, admissible `λ ∈ [−3, 3]`,
/// `κ ∈ [0, 3]` and `τ ∈ [−3, 3]`.
pub fn screw_samples(seed: u64, count: usize) -> Vec<ScrewSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let k = random_space_form(&mut rng);
        let lambda = rng.random_range(-3.0..=3.0);
        let kappa = rng.random_range(0.0..=3.0);
        let tau = rng.random_range(-3.0..=3.0);
        if let Ok(cfg) = ScrewConfig::new(k, lambda) {
            out.push(ScrewSample { cfg, kappa, tau });
        }
    }
    out
}

/// `n` equally spaced points of `[t0, t1]`, both ends included.
pub fn time_grid(n: usize, t0: f64, t1: f64) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect(),
    }
}

// ---------------------------------------------------------------------------
// Individual properties

/// Largest entrywise distance between `Φ(γ_{e₁, (τ−λ)e₁ + κe₃}(t))` and the
/// independently assembled geometric-form frame.
pub fn equivalence_residual(s: &ScrewSample, times: &[f64]) -> f64 {
    let lambda = s.cfg.lambda();
    let y = Vec3::new(s.tau - lambda, 0.0, s.kappa);
    times
        .iter()
        .map(|&t| {
            let lie = phi(&geodesic_lie(&Vec3::x(), &y, &s.cfg, t));
            let geo = geometric_frame(s.kappa, s.tau, &Mat3::identity(), lambda, s.cfg.space_form(), t);
            lie.distance(&geo)
        })
        .fold(0.0, f64::max)
}

/// Off-distribution residual and speed deviation of the geometric-form
/// geodesic over `times`.
pub fn horizontality_residuals(s: &ScrewSample, times: &[f64]) -> Result<(f64, f64)> {
    let spec = GeodesicSpec::geometric(s.kappa, s.tau, Mat3::identity(), s.cfg)?;
    let report = horizontality_check(&spec, times);
    Ok((report.max_residual, report.max_speed_deviation(1.0)))
}

/// Largest relative error of `(κ, τ)` read off random unit-speed generators
/// against finite differences along their orbits.
///
/// Generators with `κ < 0.05` or `|τ| < 0.05` are redrawn: there the
/// relative error of τ measures the conditioning of the division by κ² (or
/// of a near-zero denominator) rather than the formula.
pub fn frenet_oracle_error(seed: u64, count: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let e0 = Vec4::new(1.0, 0.0, 0.0, 0.0);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < count {
        let k = random_space_form(&mut rng);
        let x = Vec3::new(rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0), rng.random_range(-1.0..=1.0));
        if x.norm() < 0.1 {
            continue;
        }
        let x = x.normalize();
        let w = Vec3::new(rng.random_range(-3.0..=3.0), rng.random_range(-3.0..=3.0), rng.random_range(-3.0..=3.0));
        let t0 = rng.random_range(0.0..=1.0);
        let v = algebra_from_parts(&x, &w, k);
        let exact = kappa_tau_from_generator(&v)?;
        if exact.kappa < 0.05 || exact.tau.abs() < 0.05 {
            continue;
        }
        let fd = finite_difference_frenet(|t| exp_at(&v, t).act(&e0), k, t0, 1e-2);
        let err = ((fd.kappa - exact.kappa) / exact.kappa).abs().max(((fd.tau - exact.tau) / exact.tau).abs());
        worst = worst.max(err);
        done += 1;
    }
    Ok(worst)
}

/// The Euclidean helix with `c = 1/√2`, `μ = 1`, `r = 1` against the
/// curvature and torsion of `(cos s, sin s, s)`.
pub fn classical_helix_error() -> Result<f64> {
    let h = AxisHelix::unit_speed(1.0, 1.0, SpaceForm::Flat)?;
    let got = h.frenet()?.value;
    // (r cos(cμt), r sin(cμt), ct) has a = r and b = 1/μ
    let want = classical_helix(1.0, 1.0 / h.mu);
    Ok((got.kappa - want.kappa).abs().max((got.tau - want.tau).abs()))
}

/// Largest entrywise gap between `g⁻¹V(c, μ)g` and the explicit matrix.
pub fn matrix_w_error(seed: u64, count: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let k = random_space_form(&mut rng);
        let c = rng.random_range(0.1..=2.0);
        let mu = rng.random_range(0.1..=3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let r = rng.random_range(0.05..=3.0);
        let v = standard_helix_generator(c, mu, k)?;
        let w = v.conjugate_by(&radial_translation(r, k));
        worst = worst.max((w.matrix() - matrix_w(c, mu, r, k)).abs().max());
    }
    Ok(worst)
}

/// Largest relative gap between the curvature of a unit-speed axis helix and
/// `(1 − c²) cot_k r`, for `k ∈ {0, −1}`, `r ∈ [0.1, 3]`, `|μ| ∈ [0.2, 3]`.
pub fn curvature_identity_error(seed: u64, count: usize) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let k = if rng.random_bool(0.5) { SpaceForm::Flat } else { SpaceForm::Hyperbolic };
        let r = rng.random_range(0.1..=3.0);
        let mu = rng.random_range(0.2..=3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let c = unit_speed_axis_speed(r, mu, k)?;
        let kappa = kappa_tau_from_axis(c, mu, k)?.value.kappa;
        let other = (1.0 - c * c) * cot_k(r, k);
        worst = worst.max((kappa - other).abs() / other.abs());
    }
    Ok(worst)
}

/// Worst value of every `verify_entry` check over a list of entries.
fn summarize_checks(
    label: &str,
    entries: &[crate::spectrum::SpectrumEntry],
    cfg: &ScrewConfig,
    tol: &VerifyTolerances,
) -> Vec<Property> {
    use std::collections::BTreeMap;
    let mut agg: BTreeMap<String, Property> = BTreeMap::new();
    let name_of = |c: &crate::spectrum::Check| {
        if c.name.starts_with("reconstruction") {
            "reconstruction".to_string()
        } else {
            c.name.clone()
        }
    };
    for e in entries {
        for c in verify_entry(e, cfg, tol).checks {
            let upper = c.name != "primitivity";
            let key = name_of(&c);
            let slot = agg.entry(key.clone()).or_insert_with(|| Property {
                suite: Suite::Closing,
                name: format!("{label}/{key}"),
                value: if upper { 0.0 } else { f64::INFINITY },
                limit: c.limit,
                upper,
                passed: true,
            });
            slot.value = if upper { slot.value.max(c.value) } else { slot.value.min(c.value) };
            slot.passed &= c.passed;
        }
    }
    let mut out: Vec<Property> = agg.into_values().collect();
    out.push(Property::lower(Suite::Closing, format!("{label}/entries"), entries.len() as f64, 0.0));
    out
}

/// `verify_entry` over the bundled samples, several model spectra and the
/// helix-type examples.
pub fn closing_battery(tol: &VerifyTolerances) -> Result<Vec<Property>> {
    let mut out = Vec::new();
    for run in RUNS {
        let cfg = run.config()?;
        let es = full_spectrum(&run.clspectrum()?, &cfg, &run.budget()?)?;
        out.extend(summarize_checks(run.name, &es, &cfg, tol));
    }
    for (k, lambda) in [(SpaceForm::Flat, 1.0), (SpaceForm::Spherical, 0.0), (SpaceForm::Spherical, 2.0), (SpaceForm::Hyperbolic, 0.5)] {
        let cfg = ScrewConfig::new(k, lambda)?;
        let es = model_spectrum(&cfg, &EnumerationBudget::new(40.0)?)?;
        out.extend(summarize_checks(&format!("model(k={k},lambda={lambda})"), &es, &cfg, tol));
    }
    let cfg = ScrewConfig::new(SpaceForm::Flat, 1.0)?;
    let ht = HelixType::new(ComplexLength::new(2.0 * std::f64::consts::PI, 0.0)?, 1, 1)?;
    let es: Vec<_> = [(1, 1), (1, 2)]
        .into_iter()
        .filter_map(|(n, m)| helix_witness(&ht, &cfg, n, m).transpose())
        .map(|w| w.map(|w| crate::spectrum::SpectrumEntry { length: w.length, witnesses: vec![w] }))
        .collect::<Result<_>>()?;
    out.extend(summarize_checks("helix-type(2pi,1,1)", &es, &cfg, tol));
    Ok(out)
}

// ---------------------------------------------------------------------------
// Drivers

/// Runs one suite with the sample sizes of the acceptance criteria.
pub fn run_suite(suite: Suite, seed: u64, tol: &Tolerances) -> Result<SuiteReport> {
    let mut props = Vec::new();
    match suite {
        Suite::Horizontality => {
            let grid = time_grid(50, 0.0, 10.0);
            let (mut res, mut speed) = (0.0_f64, 0.0_f64);
            for s in screw_samples(seed, 200) {
                let (r, d) = horizontality_residuals(&s, &grid)?;
                res = res.max(r);
                speed = speed.max(d);
            }
            props.push(Property::upper(suite, "off-distribution residual", res, tol.horizontal));
            props.push(Property::upper(suite, "|speed - 1|", speed, tol.speed));
        }
        Suite::Equivalence => {
            let grid = time_grid(50, 0.0, 10.0);
            let worst = screw_samples(seed, 200).iter().map(|s| equivalence_residual(s, &grid)).fold(0.0, f64::max);
            props.push(Property::upper(suite, "lie vs geometric frame", worst, tol.equivalence));
        }
        Suite::Frenet => {
            props.push(Property::upper(suite, "finite-difference kappa/tau (rel)", frenet_oracle_error(seed, 100)?, tol.frenet_relative));
            props.push(Property::upper(suite, "classical helix", classical_helix_error()?, tol.classical));
            props.push(Property::upper(suite, "conjugated generator", matrix_w_error(seed, 100)?, tol.matrix_w));
            props.push(Property::upper(
                suite,
                "kappa = (1-c^2) cot_k r (rel)",
                curvature_identity_error(seed, 100)?,
                tol.curvature_relative,
            ));
        }
        Suite::Closing => props.extend(closing_battery(&tol.verify)?),
    }
    Ok(SuiteReport { properties: props })
}

pub fn run_suites(suites: &[Suite], seed: u64, tol: &Tolerances) -> Result<SuiteReport> {
    let mut report = SuiteReport::default();
    for &s in suites {
        report.properties.extend(run_suite(s, seed, tol)?.properties);
    }
    Ok(report)
}
