//! The sub-Riemannian length spectrum of a screw structure.
//!
//! A periodic geodesic is a helix `h` together with a fibre rotation, and it
//! closes after `n` laps of `h` exactly when
//!
//! ```text
//! n L √(κ² + (λ − τ)²) = 2πm,   gcd(m, n) = 1,
//! ```
//!
//! its length then being `nL`. In the model space the closed helices are the
//! circles; in a quotient `Γ \ M_k` they are also the closed geodesics of the
//! quotient (the *fibres*) and the helices winding around them (the *helix
//! types*). This module enumerates all three families within an
//! [`EnumerationBudget`] and carries a witness for every length, so that each
//! one can be checked independently by [`verify_entry`].

use std::cmp::Ordering;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{coprime, coprime_signed, detect_rational};
use crate::error::{Error, Result};
use crate::geodesic::{fibre_rotation_axis, GeodesicSpec, ScrewConfig};
use crate::helix::{
    arcsin_k, circle_data, generator_from_kappa_tau, helix_type_params, initial_frenet_basis, kappa_tau_from_axis,
    radial_translation, sin_k, standard_helix_generator, unit_speed_axis_speed, ComplexLength, HelixType,
};
use crate::spaceform::{
    algebra_from_parts, embed_rotation, exp_at, rot, GroupElement, Mat3, Mat4, SpaceForm, Vec3,
};

/// Lengths closer than this (relative) are reported as one spectrum value.
pub const MERGE_TOL: f64 = 1e-9;
/// Largest relative disagreement tolerated between the two radius
/// computations, and between the two length formulas, while enumerating.
pub const CONSISTENCY_TOL: f64 = 1e-9;

/// Which family a witness belongs to. The order is the tie-break order of
/// the output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Circle,
    GeodesicFiber,
    HelixType,
}

impl Source {
    pub fn as_str(self) -> &'static str {
        match self {
            Source::Circle => "circle",
            Source::GeodesicFiber => "geodesic_fiber",
            Source::HelixType => "helix_type",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "circle" => Some(Source::Circle),
            "geodesic_fiber" => Some(Source::GeodesicFiber),
            "helix_type" => Some(Source::HelixType),
            _ => None,
        }
    }
}

/// Data of a periodic geodesic winding `n` times around a helix of type
/// `(ℓ + iθ, q, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelixWitness {
    pub cl: ComplexLength,
    pub q: u64,
    pub p: i64,
    pub n: u64,
    pub m: u64,
    pub r: f64,
    pub c: f64,
    pub mu: f64,
    pub kappa: f64,
    pub tau: f64,
    /// Period `L = qℓ/c` of the helix.
    pub big_l: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WitnessDetail {
    /// `n` laps of the model-space circle of radius `r`.
    Circle { m: u64, n: u64, r: f64 },
    /// `n` laps of the closed geodesic with complex length `cl`; the fibre
    /// turns `m` times (`m` may be zero or negative).
    GeodesicFiber { cl: ComplexLength, n: u64, m: i64 },
    HelixType(HelixWitness),
}

impl WitnessDetail {
    pub fn source(&self) -> Source {
        match self {
            WitnessDetail::Circle { .. } => Source::Circle,
            WitnessDetail::GeodesicFiber { .. } => Source::GeodesicFiber,
            WitnessDetail::HelixType(_) => Source::HelixType,
        }
    }

    /// The witness as the numeric tuple `(ℓ, θ, q, p, n, m, r, c, μ, κ, τ)`,
    /// with NaN for fields that do not apply.
    pub fn tuple(&self) -> [f64; 11] {
        let nan = f64::NAN;
        match *self {
            WitnessDetail::Circle { m, n, r } => [nan, nan, nan, nan, n as f64, m as f64, r, nan, nan, nan, nan],
            WitnessDetail::GeodesicFiber { cl, n, m } => {
                [cl.ell, cl.theta, nan, nan, n as f64, m as f64, nan, nan, nan, nan, nan]
            }
            WitnessDetail::HelixType(h) => [
                h.cl.ell, h.cl.theta, h.q as f64, h.p as f64, h.n as f64, h.m as f64, h.r, h.c, h.mu, h.kappa, h.tau,
            ],
        }
    }
}

/// One periodic geodesic: its length and how it was found.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub length: f64,
    pub detail: WitnessDetail,
}

impl Witness {
    pub fn source(&self) -> Source {
        self.detail.source()
    }

    /// Deterministic output order: length, then source, then witness tuple.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        self.length
            .total_cmp(&other.length)
            .then(self.source().cmp(&other.source()))
            .then_with(|| {
                let (a, b) = (self.detail.tuple(), other.detail.tuple());
                a.iter().zip(&b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
            })
    }
}

/// A spectrum value with every witness that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry {
    pub length: f64,
    pub witnesses: Vec<Witness>,
}

/// Complex length spectrum of a manifold. Repeats are allowed and ignored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CLSpectrum {
    pub entries: Vec<ComplexLength>,
    pub name: Option<String>,
}

/// Truncation parameters for the enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnumerationBudget {
    pub cutoff: f64,
    pub m_max: u64,
    pub rational_tol: f64,
    pub max_denominator: u64,
}

impl EnumerationBudget {
    pub const DEFAULT_M_MAX: u64 = 64;
    pub const DEFAULT_RATIONAL_TOL: f64 = 1e-9;
    pub const DEFAULT_MAX_DENOMINATOR: u64 = 1_000_000;

    /// Budget with the given cutoff and default values elsewhere.
    pub fn new(cutoff: f64) -> Result<Self> {
        Self {
            cutoff,
            m_max: Self::DEFAULT_M_MAX,
            rational_tol: Self::DEFAULT_RATIONAL_TOL,
            max_denominator: Self::DEFAULT_MAX_DENOMINATOR,
        }
        .validated()
    }

    pub fn with_m_max(mut self, m_max: u64) -> Result<Self> {
        self.m_max = m_max;
        self.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.cutoff > 0.0 && self.cutoff.is_finite()) {
            return Err(Error::Domain(format!("cutoff {} must be positive and finite", self.cutoff)));
        }
        if self.m_max == 0 || self.max_denominator == 0 {
            return Err(Error::Domain("m_max and max_denominator must be positive".into()));
        }
        if !(self.rational_tol > 0.0) {
            return Err(Error::Domain(format!("rational_tol {} must be positive", self.rational_tol)));
        }
        Ok(self)
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Sorts, removes duplicate witnesses, and groups lengths within
/// [`MERGE_TOL`] of the first length of their group.
pub fn merge_witnesses(mut ws: Vec<Witness>) -> Vec<SpectrumEntry> {
    ws.sort_by(Witness::total_cmp);
    ws.dedup_by(|a, b| a.total_cmp(b).is_eq());
    let mut out: Vec<SpectrumEntry> = Vec::new();
    for w in ws {
        match out.last_mut() {
            Some(e) if rel_diff(e.length, w.length) <= MERGE_TOL => e.witnesses.push(w),
            _ => out.push(SpectrumEntry { length: w.length, witnesses: vec![w] }),
        }
    }
    out
}

pub fn flatten(entries: &[SpectrumEntry]) -> Vec<Witness> {
    entries.iter().flat_map(|e| e.witnesses.iter().copied()).collect()
}

/// Keeps what a run with the smaller `budget` would have produced.
pub fn restrict(entries: &[SpectrumEntry], budget: &EnumerationBudget) -> Vec<SpectrumEntry> {
    let kept = flatten(entries)
        .into_iter()
        .filter(|w| w.length <= budget.cutoff)
        .filter(|w| match w.detail {
            WitnessDetail::HelixType(h) => h.m <= budget.m_max,
            _ => true,
        })
        .collect();
    merge_witnesses(kept)
}

// ---------------------------------------------------------------------------
// Model space

fn model_witnesses(cfg: &ScrewConfig, budget: &EnumerationBudget) -> Result<Vec<Witness>> {
    let gap = cfg.pitch_gap();
    // |m² − n²| ≤ |λ² − k| (Λ/2π)²
    let bound = gap.abs() * (budget.cutoff / (2.0 * PI)).powi(2);
    let mut out = Vec::new();
    // the smaller of (m, n) is `a`, the larger `b`; b² − a² ≥ 2a + 1
    let mut a: u64 = 1;
    while (2 * a + 1) as f64 <= bound {
        let mut b = a + 1;
        while ((b * b - a * a) as f64) <= bound {
            if coprime(a, b) {
                let (m, n) = if gap > 0.0 { (b, a) } else { (a, b) };
                if let Some(w) = circle_witness(m, n, cfg)? {
                    if w.length <= budget.cutoff {
                        out.push(w);
                    }
                }
            }
            b += 1;
        }
        a += 1;
    }
    Ok(out)
}

fn circle_witness(m: u64, n: u64, cfg: &ScrewConfig) -> Result<Option<Witness>> {
    let k = cfg.space_form();
    let gap = cfg.pitch_gap();
    let (mf, nf) = (m as f64, n as f64);
    let num = mf * mf - nf * nf;
    let sin2 = num / (nf * nf * gap);
    if !(sin2 > 0.0) || (k == SpaceForm::Spherical && sin2 > 1.0) {
        return Ok(None);
    }
    let r = arcsin_k(sin2.sqrt(), k)?;
    let length = 2.0 * PI * (num / gap).sqrt();
    Ok(Some(Witness { length, detail: WitnessDetail::Circle { m, n, r } }))
}

/// Lengths of the periodic geodesics of the model space `SO(M_k)`.
pub fn model_spectrum(cfg: &ScrewConfig, budget: &EnumerationBudget) -> Result<Vec<SpectrumEntry>> {
    Ok(merge_witnesses(model_witnesses(cfg, budget)?))
}

// ---------------------------------------------------------------------------
// Closed geodesics of the quotient

fn fibre_witness(cl: &ComplexLength, cfg: &ScrewConfig, budget: &EnumerationBudget) -> Option<Witness> {
    let x = (cfg.lambda() * cl.ell + cl.theta) / (2.0 * PI);
    let (m, n) = detect_rational(x, budget.max_denominator, budget.rational_tol)?;
    let length = n as f64 * cl.ell;
    (length <= budget.cutoff).then_some(Witness { length, detail: WitnessDetail::GeodesicFiber { cl: *cl, n, m } })
}

/// Lengths of the periodic geodesics lying over the closed geodesic with
/// complex length `cl`.
pub fn geodesic_fiber_lengths(cl: &ComplexLength, cfg: &ScrewConfig, budget: &EnumerationBudget) -> Vec<SpectrumEntry> {
    merge_witnesses(fibre_witness(cl, cfg, budget).into_iter().collect())
}

// ---------------------------------------------------------------------------
// Helix types

fn require_quotient_scope(k: SpaceForm) -> Result<()> {
    if k == SpaceForm::Spherical {
        return Err(Error::OutOfScope(
            "spectra of spherical quotients are not covered: the union theorem excludes k = 1".into(),
        ));
    }
    Ok(())
}

/// `|2πp − q(θ + λℓ)|`.
fn resonance_defect(ht: &HelixType, lambda: f64) -> f64 {
    (2.0 * PI * ht.p as f64 - ht.q as f64 * (ht.cl.theta + lambda * ht.cl.ell)).abs()
}

/// Pairs whose gate margin is below this fraction of `4π²m²` are the
/// degenerate boundary where the helix collapses onto its axis.
pub const GATE_EPS: f64 = 1e-12;

/// `4π²m² − n²(2πp − q(θ+λℓ))²`, evaluated in factored form.
fn gate_margin(ht: &HelixType, lambda: f64, n: u64, m: u64) -> f64 {
    let d = resonance_defect(ht, lambda);
    let (tm, nd) = (2.0 * PI * m as f64, n as f64 * d);
    (tm - nd) * (tm + nd)
}

/// The closing gate in its squared form, `4π²m² > n²(2πp − q(θ+λℓ))²`.
pub fn gate_squared(ht: &HelixType, lambda: f64, n: u64, m: u64) -> bool {
    let tm = 2.0 * PI * m as f64;
    gate_margin(ht, lambda, n, m) > GATE_EPS * tm * tm
}

/// The closing gate in terms of the angular speed, `2πm > nqℓ|μ − λ|`.
pub fn gate_angular(ht: &HelixType, lambda: f64, n: u64, m: u64) -> bool {
    let mu = ht.angular_speed();
    let tm = 2.0 * PI * m as f64;
    let nd = n as f64 * ht.q as f64 * ht.cl.ell * (mu - lambda).abs();
    (tm - nd) * (tm + nd) > GATE_EPS * tm * tm
}

/// Closed-form radius: `sin_k² r` is the quotient
/// `[4π²m² − n²(2πp − qθ − λℓq)²] / [n²(λ² − k)((2πp − qθ)² − kℓ²q²)]`.
pub fn helix_radius_closed_form(ht: &HelixType, cfg: &ScrewConfig, n: u64, m: u64) -> Result<f64> {
    let k = cfg.space_form();
    let (nf, qf) = (n as f64, ht.q as f64);
    let a = 2.0 * PI * ht.p as f64 - qf * ht.cl.theta;
    let num = gate_margin(ht, cfg.lambda(), n, m);
    let den = nf * nf * cfg.pitch_gap() * (a * a - k.k() * ht.cl.ell * ht.cl.ell * qf * qf);
    if !(num > 0.0 && den > 0.0) {
        return Err(Error::Domain(format!("no helix of type (q, p) = ({}, {}) closes with (n, m) = ({n}, {m})", ht.q, ht.p)));
    }
    arcsin_k((num / den).sqrt(), k)
}

/// Closed-form length
/// `√([4π²m² + n²(ℓ²(λ² − k)q² − (2πp − q(θ + λℓ))²)] / (λ² − k))`.
pub fn helix_length_closed_form(ht: &HelixType, cfg: &ScrewConfig, n: u64, m: u64) -> f64 {
    let gap = cfg.pitch_gap();
    let (mf, nf, qf) = (m as f64, n as f64, ht.q as f64);
    let d = resonance_defect(ht, cfg.lambda());
    let ell = ht.cl.ell;
    ((4.0 * PI * PI * mf * mf + nf * nf * (ell * ell * gap * qf * qf - d * d)) / gap).sqrt()
}

/// Axis speed from the closing equation
/// `((2πm/(qℓn))² + (λ² − k) − (μ − λ)²) c² = λ² − k`.
pub fn helix_axis_speed(ht: &HelixType, cfg: &ScrewConfig, n: u64, m: u64) -> f64 {
    let gap = cfg.pitch_gap();
    let u = 2.0 * PI * m as f64 / (ht.q as f64 * ht.cl.ell * n as f64);
    let dm = ht.angular_speed() - cfg.lambda();
    (gap / (u * u + gap - dm * dm)).sqrt()
}

/// Closing defect `nqℓ/c(r) · √(κ(r)² + (λ − τ(r))²) − 2πm` of the unit-speed
/// helix with radius `r` around the axis of `ht`.
fn closing_defect(ht: &HelixType, cfg: &ScrewConfig, n: u64, m: u64, r: f64) -> f64 {
    let k = cfg.space_form();
    let mu = ht.angular_speed();
    let s = sin_k(r, k);
    let co = crate::helix::cos_k(r, k);
    let c2 = 1.0 / (co * co + mu * mu * s * s);
    // 1 − c² and λ − τ written without cancellation
    let one_minus_c2 = c2 * (mu * mu - k.k()) * s * s;
    let kappa2 = (c2 * mu * mu - k.k()) * one_minus_c2;
    let lt = (cfg.lambda() - mu) + mu * one_minus_c2;
    let big_l = ht.q as f64 * ht.cl.ell / c2.sqrt();
    n as f64 * big_l * (kappa2 + lt * lt).sqrt() - 2.0 * PI * m as f64
}

/// Radius found by bisection on the closing condition; an oracle for
/// [`helix_radius_closed_form`] that does not use it.
pub fn helix_radius_by_bisection(ht: &HelixType, cfg: &ScrewConfig, n: u64, m: u64) -> Result<f64> {
    require_quotient_scope(cfg.space_form())?;
    let f = |r: f64| closing_defect(ht, cfg, n, m, r);
    let mut lo = 0.0_f64;
    if !(f(f64::MIN_POSITIVE) < 0.0) {
        return Err(Error::Domain("closing defect is not negative near the axis".into()));
    }
    let mut hi = 1.0_f64;
    let mut grow = 0;
    while !(f(hi) > 0.0) {
        lo = hi;
        hi *= 2.0;
        grow += 1;
        if grow > 1100 || !hi.is_finite() {
            return Err(Error::Domain("no sign change of the closing defect".into()));
        }
    }
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Witness for `n` laps around the helix of type `ht` with `m` fibre turns,
/// or `None` if that pair does not close.
pub fn helix_witness(ht: &HelixType, cfg: &ScrewConfig, n: u64, m: u64) -> Result<Option<Witness>> {
    helix_witness_below(ht, cfg, n, m, f64::INFINITY)
}

/// As [`helix_witness`], skipping the radius solve when the length exceeds
/// `cutoff`.
fn helix_witness_below(ht: &HelixType, cfg: &ScrewConfig, n: u64, m: u64, cutoff: f64) -> Result<Option<Witness>> {
    let k = cfg.space_form();
    require_quotient_scope(k)?;
    if n == 0 || m == 0 || !coprime(m, n) {
        return Ok(None);
    }
    let mu = ht.angular_speed();
    if k == SpaceForm::Flat && mu == 0.0 {
        // the helix degenerates to the axis itself
        return Ok(None);
    }
    if !gate_squared(ht, cfg.lambda(), n, m) {
        return Ok(None);
    }
    let length = helix_length_closed_form(ht, cfg, n, m);
    if length > cutoff {
        return Ok(None);
    }
    let c = helix_axis_speed(ht, cfg, n, m);
    let r = helix_radius_closed_form(ht, cfg, n, m)?;
    let (big_l, mu) = helix_type_params(ht, c)?;
    let frenet = kappa_tau_from_axis(c, mu, k)?.value;

    let length_nl = n as f64 * big_l;
    if rel_diff(length, length_nl) > CONSISTENCY_TOL {
        return Err(Error::InconsistentWitness(format!(
            "type {ht:?}, (n, m) = ({n}, {m}): closed-form length {length:.17e} but nqℓ/c = {length_nl:.17e}"
        )));
    }
    let r_oracle = helix_radius_by_bisection(ht, cfg, n, m)?;
    if rel_diff(r, r_oracle) > CONSISTENCY_TOL {
        return Err(Error::InconsistentWitness(format!(
            "type {ht:?}, (n, m) = ({n}, {m}): closed-form radius {r:.17e} but the closing condition gives {r_oracle:.17e}"
        )));
    }
    let c_from_r = unit_speed_axis_speed(r, mu, k)?;
    if rel_diff(c, c_from_r) > CONSISTENCY_TOL {
        return Err(Error::InconsistentWitness(format!(
            "type {ht:?}, (n, m) = ({n}, {m}): axis speed {c:.17e} but the radius gives {c_from_r:.17e}"
        )));
    }
    Ok(Some(Witness {
        length,
        detail: WitnessDetail::HelixType(HelixWitness {
            cl: ht.cl,
            q: ht.q,
            p: ht.p,
            n,
            m,
            r,
            c,
            mu,
            kappa: frenet.kappa,
            tau: frenet.tau,
            big_l,
        }),
    }))
}

/// Lengths of the periodic geodesics over helices of type `ht`.
pub fn helix_type_lengths(ht: &HelixType, cfg: &ScrewConfig, budget: &EnumerationBudget) -> Result<Vec<SpectrumEntry>> {
    require_quotient_scope(cfg.space_form())?;
    let qell = ht.q as f64 * ht.cl.ell;
    let mut out = Vec::new();
    let mut n = 1u64;
    while (n as f64) * qell < budget.cutoff {
        for m in 1..=budget.m_max {
            out.extend(helix_witness_below(ht, cfg, n, m, budget.cutoff)?);
        }
        n += 1;
    }
    Ok(merge_witnesses(out))
}

/// All helix-type witnesses around the geodesic with complex length `cl`.
fn helix_witnesses_around(cl: &ComplexLength, cfg: &ScrewConfig, budget: &EnumerationBudget) -> Result<Vec<Witness>> {
    let x = cl.theta + cfg.lambda() * cl.ell;
    let mut out = Vec::new();
    let mut q = 1u64;
    while (q as f64) * cl.ell < budget.cutoff {
        let qf = q as f64;
        let mut n = 1u64;
        while (n * q) as f64 * cl.ell < budget.cutoff {
            for m in (1..=budget.m_max).filter(|&m| coprime(m, n)) {
                // |2πp − qx| < 2πm/n
                let half = m as f64 / n as f64;
                let centre = qf * x / (2.0 * PI);
                let p_lo = (centre - half).floor() as i64;
                let p_hi = (centre + half).ceil() as i64;
                for p in p_lo..=p_hi {
                    if !coprime_signed(p, q) {
                        continue;
                    }
                    let ht = HelixType::new(*cl, q, p)?;
                    out.extend(helix_witness_below(&ht, cfg, n, m, budget.cutoff)?);
                }
            }
            n += 1;
        }
        q += 1;
    }
    Ok(out)
}

/// The full length spectrum of `SO(Γ \ M_k)` for a quotient with complex
/// length spectrum `cls`: circles of the model space, fibres over closed
/// geodesics, and geodesics over periodic helices.
pub fn full_spectrum(cls: &CLSpectrum, cfg: &ScrewConfig, budget: &EnumerationBudget) -> Result<Vec<SpectrumEntry>> {
    require_quotient_scope(cfg.space_form())?;
    let budget = budget.validated()?;
    let mut cls_sorted = cls.entries.clone();
    cls_sorted.sort_by(|a, b| a.ell.total_cmp(&b.ell).then(a.theta.total_cmp(&b.theta)));
    cls_sorted.dedup();

    let per_cl: Vec<Vec<Witness>> = cls_sorted
        .par_iter()
        .map(|cl| {
            let mut ws = helix_witnesses_around(cl, cfg, &budget)?;
            ws.extend(fibre_witness(cl, cfg, &budget));
            Ok(ws)
        })
        .collect::<Result<_>>()?;
    let mut all = model_witnesses(cfg, &budget)?;
    all.extend(per_cl.into_iter().flatten());
    Ok(merge_witnesses(all))
}

// ---------------------------------------------------------------------------
// Verification

/// Thresholds for [`verify_entry`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyTolerances {
    /// Relative residual of `nL√(κ² + (λ−τ)²) = 2πm`.
    pub fundamental: f64,
    /// `‖Rot − I‖` and group closure.
    pub closure: f64,
    /// Residual of `n(λℓ + θ) = 2πm′` and of the matching closure.
    pub fibre: f64,
    /// Agreement of recomputed witness data.
    pub consistency: f64,
    /// Circles and fibres: recomputed length, relative.
    pub length: f64,
    /// Helix types: `length = nqℓ/c`, relative.
    pub helix_length: f64,
    /// Smallest admissible `‖Rot − I‖` at a proper divisor of the period.
    pub primitivity: f64,
}

impl Default for VerifyTolerances {
    fn default() -> Self {
        VerifyTolerances {
            fundamental: 1e-10,
            closure: 1e-9,
            fibre: 1e-8,
            consistency: 1e-9,
            length: 1e-12,
            helix_length: 1e-11,
            primitivity: 1e-6,
        }
    }
}

impl VerifyTolerances {
    /// Every upper tolerance replaced by `tol`; the primitivity margin is
    /// kept.
    pub fn uniform(tol: f64) -> Self {
        VerifyTolerances {
            fundamental: tol,
            closure: tol,
            fibre: tol,
            consistency: tol,
            length: tol,
            helix_length: tol,
            primitivity: VerifyTolerances::default().primitivity,
        }
    }
}

/// One named check: `value < limit` for residuals, `value > limit` for
/// margins.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, passed: value < limit }
    }

    fn above(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Check { name: name.into(), value, limit, passed: value > limit }
    }

    fn exact(name: impl Into<String>, ok: bool) -> Self {
        Check { name: name.into(), value: if ok { 0.0 } else { 1.0 }, limit: 0.5, passed: ok }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Largest value among the checks called `name`.
    pub fn max_value(&self, name: &str) -> Option<f64> {
        self.checks.iter().filter(|c| c.name == name).map(|c| c.value).reduce(f64::max)
    }
}

fn rot_defect(w: &Vec3, t: f64) -> f64 {
    (rot(w, t) - Mat3::identity()).abs().max()
}

/// `exp(aP + bK)` where `P` is the transvection along `e₁` and `K` the
/// rotation about it; `b` is reduced mod 2π before exponentiating.
fn axis_motion(a: f64, b: f64, k: SpaceForm) -> GroupElement {
    let p = algebra_from_parts(&Vec3::x(), &Vec3::zeros(), k);
    let turn = embed_rotation(&rot(&Vec3::x(), b.rem_euclid(2.0 * PI)));
    exp_at(&p, a) * GroupElement::new_unchecked(turn, k)
}

fn scaled_distance(a: &Mat4, b: &Mat4) -> f64 {
    (a - b).abs().max() / b.abs().max().max(1.0)
}

/// Checks every witness of `entry` by rebuilding its geodesic.
pub fn verify_entry(entry: &SpectrumEntry, cfg: &ScrewConfig, tol: &VerifyTolerances) -> VerificationReport {
    let mut report = VerificationReport::default();
    for w in &entry.witnesses {
        report.checks.push(Check::below("merge", rel_diff(entry.length, w.length), MERGE_TOL * 1.000_001));
        report.checks.extend(verify_witness(w, cfg, tol).checks);
    }
    if entry.witnesses.is_empty() {
        report.checks.push(Check::exact("has-witness", false));
    }
    report
}

pub fn verify_witness(w: &Witness, cfg: &ScrewConfig, tol: &VerifyTolerances) -> VerificationReport {
    let mut checks = Vec::new();
    let outcome = match w.detail {
        WitnessDetail::Circle { m, n, r } => verify_circle(w.length, m, n, r, cfg, tol, &mut checks),
        WitnessDetail::GeodesicFiber { cl, n, m } => verify_fibre(w.length, &cl, n, m, cfg, tol, &mut checks),
        WitnessDetail::HelixType(h) => verify_helix(w.length, &h, cfg, tol, &mut checks),
    };
    if let Err(e) = outcome {
        checks.push(Check { name: format!("reconstruction: {e}"), value: f64::NAN, limit: 0.0, passed: false });
    }
    VerificationReport { checks }
}

fn fundamental_residual(n: u64, m: u64, big_l: f64, kappa: f64, tau: f64, lambda: f64) -> f64 {
    let target = 2.0 * PI * m as f64;
    (n as f64 * big_l * kappa.hypot(lambda - tau) - target).abs() / target
}

fn primitivity_margin(w: &Vec3, period: f64, laps: u64) -> f64 {
    (1..laps).map(|j| rot_defect(w, j as f64 * period)).fold(f64::INFINITY, f64::min)
}

fn verify_circle(
    length: f64,
    m: u64,
    n: u64,
    r: f64,
    cfg: &ScrewConfig,
    tol: &VerifyTolerances,
    checks: &mut Vec<Check>,
) -> Result<()> {
    checks.push(Check::exact("gcd(m,n)", coprime(m, n)));
    let (big_l, kappa) = circle_data(r, cfg.space_form())?;
    let t = n as f64 * big_l;
    checks.push(Check::below("length", rel_diff(length, t), tol.length));
    checks.push(Check::below("fundamental", fundamental_residual(n, m, big_l, kappa, 0.0, cfg.lambda()), tol.fundamental));
    let w = fibre_rotation_axis(kappa, 0.0, cfg.lambda());
    checks.push(Check::below("rot-closure", rot_defect(&w, t), tol.closure));
    let spec = GeodesicSpec::geometric(kappa, 0.0, Mat3::identity(), *cfg)?;
    let end = spec.at(t);
    checks.push(Check::below("closure", scaled_distance(end.matrix(), &Mat4::identity()), tol.closure));
    checks.push(Check::above("primitivity", primitivity_margin(&w, big_l, n), tol.primitivity));
    Ok(())
}

fn verify_fibre(
    length: f64,
    cl: &ComplexLength,
    n: u64,
    m: i64,
    cfg: &ScrewConfig,
    tol: &VerifyTolerances,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let k = cfg.space_form();
    let lambda = cfg.lambda();
    checks.push(Check::exact("gcd(m,n)", n > 0 && coprime_signed(m, n)));
    let t = n as f64 * cl.ell;
    checks.push(Check::below("length", rel_diff(length, t), tol.length));
    let turn = n as f64 * (lambda * cl.ell + cl.theta);
    checks.push(Check::below("fibre", (turn - 2.0 * PI * m as f64).abs(), tol.fibre));
    // n laps of γ(t) = exp(t P + λ t K), brought back by the deck element
    // exp(ℓP − θK) applied n times
    let back = axis_motion(length - t, lambda * length + n as f64 * cl.theta, k);
    checks.push(Check::below("closure", scaled_distance(back.matrix(), &Mat4::identity()), tol.fibre));
    let per_lap = lambda * cl.ell + cl.theta;
    checks.push(Check::above("primitivity", primitivity_margin(&Vec3::x(), per_lap, n), tol.primitivity));
    Ok(())
}

fn verify_helix(
    length: f64,
    h: &HelixWitness,
    cfg: &ScrewConfig,
    tol: &VerifyTolerances,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let k = cfg.space_form();
    require_quotient_scope(k)?;
    let lambda = cfg.lambda();
    checks.push(Check::exact("gcd(p,q)", h.q > 0 && coprime_signed(h.p, h.q)));
    checks.push(Check::exact("gcd(m,n)", coprime(h.m, h.n)));
    let ht = HelixType::new(h.cl, h.q, h.p)?;
    checks.push(Check::exact("gate", gate_squared(&ht, lambda, h.n, h.m)));

    // internal consistency of the stored data
    let c_r = unit_speed_axis_speed(h.r, h.mu, k)?;
    let frenet = kappa_tau_from_axis(h.c, h.mu, k)?.value;
    let consistency = [
        rel_diff(h.mu, ht.angular_speed()),
        rel_diff(h.c, c_r),
        rel_diff(h.big_l, h.q as f64 * h.cl.ell / h.c),
        (h.kappa - frenet.kappa).abs() / frenet.kappa.max(1.0),
        (h.tau - frenet.tau).abs() / frenet.tau.abs().max(1.0),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    checks.push(Check::below("consistency", consistency, tol.consistency));
    let t = h.n as f64 * h.q as f64 * h.cl.ell / h.c;
    checks.push(Check::below("helix-length", rel_diff(length, t), tol.helix_length));
    checks.push(Check::below(
        "fundamental",
        fundamental_residual(h.n, h.m, h.big_l, h.kappa, h.tau, lambda),
        tol.fundamental,
    ));
    let w = fibre_rotation_axis(h.kappa, h.tau, lambda);
    checks.push(Check::below("rot-closure", rot_defect(&w, t), tol.closure));

    // place the Frenet helix (κ, τ) onto the axis helix of radius r
    let v = standard_helix_generator(h.c, h.mu, k)?;
    let g = radial_translation(h.r, k);
    let o0 = initial_frenet_basis(&v.conjugate_by(&g))?;
    let g0 = g * GroupElement::rotation(&o0, k);
    let z = generator_from_kappa_tau(h.kappa, h.tau, k)?;
    let conj = g0.matrix() * z.matrix() * g0.inverse().matrix();
    checks.push(Check::below("conjugacy", scaled_distance(&conj, v.matrix()), tol.closure));

    // g_deck^{-nq} · g0 e^{TZ} Rot(w, T) with g0 e^{TZ} = e^{TV} g0, and the
    // axis parts of e^{TV} and g_deck combined into one exponent
    let nq = (h.n * h.q) as f64;
    let back = axis_motion(t * h.c - nq * h.cl.ell, t * h.c * h.mu + nq * h.cl.theta, k);
    let end = back * g0 * GroupElement::rotation(&rot(&w, t), k);
    checks.push(Check::below("deck-closure", scaled_distance(end.matrix(), g0.matrix()), tol.closure));

    let helix_turn = h.cl.ell * h.mu + h.cl.theta;
    let margin = primitivity_margin(&Vec3::x(), helix_turn, h.q).min(primitivity_margin(&w, h.big_l, h.n));
    checks.push(Check::above("primitivity", margin, tol.primitivity));
    Ok(())
}

// ---------------------------------------------------------------------------
// Comparison

/// First place where two length lists disagree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mismatch {
    pub index: usize,
    pub a: Option<f64>,
    pub b: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareReport {
    pub len_a: usize,
    pub len_b: usize,
    pub first_mismatch: Option<Mismatch>,
}

impl CompareReport {
    pub fn matched(&self) -> bool {
        self.first_mismatch.is_none()
    }
}

/// Sorted distinct lengths, values within `tol` (relative) collapsed.
pub fn distinct_lengths(lengths: impl IntoIterator<Item = f64>, tol: f64) -> Vec<f64> {
    let mut v: Vec<f64> = lengths.into_iter().collect();
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for x in v {
        match out.last() {
            Some(&y) if rel_diff(x, y) <= tol => {}
            _ => out.push(x),
        }
    }
    out
}

/// Whether two spectra have the same length set up to `tol`, relative.
pub fn compare_spectra(a: &[SpectrumEntry], b: &[SpectrumEntry], tol: f64) -> CompareReport {
    compare_lengths(a.iter().map(|e| e.length), b.iter().map(|e| e.length), tol)
}

pub fn compare_lengths(a: impl IntoIterator<Item = f64>, b: impl IntoIterator<Item = f64>, tol: f64) -> CompareReport {
    let (a, b) = (distinct_lengths(a, tol), distinct_lengths(b, tol));
    let first_mismatch = (0..a.len().max(b.len())).find_map(|i| {
        let (x, y) = (a.get(i).copied(), b.get(i).copied());
        match (x, y) {
            (Some(x), Some(y)) if rel_diff(x, y) <= tol => None,
            _ => Some(Mismatch { index: i, a: x, b: y }),
        }
    });
    CompareReport { len_a: a.len(), len_b: b.len(), first_mismatch }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg(k: SpaceForm, lambda: f64) -> ScrewConfig {
        ScrewConfig::new(k, lambda).unwrap()
    }

    fn lengths(es: &[SpectrumEntry]) -> Vec<f64> {
        es.iter().map(|e| e.length).collect()
    }

    #[test]
    fn flat_model_spectrum_below_twenty() {
        let c = cfg(SpaceForm::Flat, 1.0);
        let es = model_spectrum(&c, &EnumerationBudget::new(20.0).unwrap()).unwrap();
        // (m, n) = (2,1), (3,2), (4,3), (3,1), (5,4)
        let want = [3.0_f64, 5.0, 7.0, 8.0, 9.0].map(|x| 2.0 * PI * x.sqrt());
        assert_eq!(es.len(), 5);
        for (e, w) in es.iter().zip(want) {
            assert_relative_eq!(e.length, w, max_relative = 1e-12);
            let rep = verify_entry(e, &c, &VerifyTolerances::default());
            assert!(rep.passed(), "{rep:?}");
        }
        let WitnessDetail::Circle { m, n, r } = es[0].witnesses[0].detail else { panic!() };
        assert_eq!((m, n), (2, 1));
        assert_relative_eq!(r, 3.0_f64.sqrt(), max_relative = 1e-15);
        let rep = verify_entry(&es[0], &c, &VerifyTolerances::default());
        assert!(rep.max_value("fundamental").unwrap() < 1e-12);
    }

    #[test]
    fn spherical_model_spectrum_with_small_pitch() {
        let c = cfg(SpaceForm::Spherical, 0.0);
        let es = model_spectrum(&c, &EnumerationBudget::new(11.0).unwrap()).unwrap();
        let hit = es.iter().find(|e| (e.length - 2.0 * PI * 3.0_f64.sqrt()).abs() < 1e-12).unwrap();
        assert!(matches!(hit.witnesses[0].detail, WitnessDetail::Circle { m: 1, n: 2, .. }));
        for e in &es {
            assert!(verify_entry(e, &c, &VerifyTolerances::default()).passed());
        }
    }

    #[test]
    fn model_spectra_distinguish_pitches() {
        let b = EnumerationBudget::new(100.0).unwrap();
        let a = model_spectrum(&cfg(SpaceForm::Flat, 2.0), &b).unwrap();
        let c = model_spectrum(&cfg(SpaceForm::Flat, 3.0), &b).unwrap();
        assert!(!compare_spectra(&a, &c, 1e-9).matched());
        assert!(compare_spectra(&a, &a, 1e-9).matched());
    }

    #[test]
    fn fibre_examples() {
        let c = cfg(SpaceForm::Flat, 1.0);
        let b = EnumerationBudget::new(100.0).unwrap();
        let es = geodesic_fiber_lengths(&ComplexLength::new(PI, 0.0).unwrap(), &c, &b);
        assert_eq!(es.len(), 1);
        assert_relative_eq!(es[0].length, 2.0 * PI, max_relative = 1e-15);
        assert!(matches!(es[0].witnesses[0].detail, WitnessDetail::GeodesicFiber { n: 2, m: 1, .. }));
        assert!(verify_entry(&es[0], &c, &VerifyTolerances::default()).passed());

        assert!(geodesic_fiber_lengths(&ComplexLength::new(1.0, 0.5).unwrap(), &c, &b).is_empty());

        // λℓ + θ = 0
        let h = cfg(SpaceForm::Hyperbolic, -0.5);
        let es = geodesic_fiber_lengths(&ComplexLength::new(1.0, 0.5).unwrap(), &h, &b);
        assert_eq!(es[0].length, 1.0);
        assert!(matches!(es[0].witnesses[0].detail, WitnessDetail::GeodesicFiber { n: 1, m: 0, .. }));
    }

    #[test]
    fn helix_type_examples() {
        let c = cfg(SpaceForm::Flat, 1.0);
        let ht = HelixType::new(ComplexLength::new(2.0 * PI, 0.0).unwrap(), 1, 1).unwrap();
        let w = helix_witness(&ht, &c, 1, 1).unwrap().unwrap();
        let WitnessDetail::HelixType(h) = w.detail else { panic!() };
        assert_relative_eq!(w.length, 2.0 * PI * 2.0_f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(h.r, 1.0, max_relative = 1e-12);
        assert_relative_eq!(h.c * h.c, 0.5, max_relative = 1e-12);
        assert_relative_eq!(h.kappa, 0.5, max_relative = 1e-12);
        assert_relative_eq!(h.tau, 0.5, max_relative = 1e-12);
        let rb = helix_radius_by_bisection(&ht, &c, 1, 1).unwrap();
        assert_relative_eq!(rb, 1.0, max_relative = 1e-9);

        let w = helix_witness(&ht, &c, 1, 2).unwrap().unwrap();
        let WitnessDetail::HelixType(h) = w.detail else { panic!() };
        assert_relative_eq!(w.length, 2.0 * PI * 5.0_f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(h.r, 2.0, max_relative = 1e-12);

        let e = SpectrumEntry { length: w.length, witnesses: vec![w] };
        let rep = verify_entry(&e, &c, &VerifyTolerances::default());
        assert!(rep.passed(), "{rep:#?}");
    }

    #[test]
    fn gate_excludes_non_closing_pairs() {
        let c = cfg(SpaceForm::Flat, 1.0);
        // μ = 1.5 from θ = π/2·... with λ = 1: |μ − λ| large
        let ht = HelixType::new(ComplexLength::new(1.0, 0.0).unwrap(), 1, 3).unwrap();
        // 2πm > nqℓ|μ − λ| fails for m = 1, n = 4
        assert!(!gate_angular(&ht, 1.0, 4, 1));
        assert!(!gate_squared(&ht, 1.0, 4, 1));
        assert!(helix_witness(&ht, &c, 4, 1).unwrap().is_none());
    }

    #[test]
    fn spherical_quotients_are_rejected() {
        let c = cfg(SpaceForm::Spherical, 2.0);
        let err = full_spectrum(&CLSpectrum::default(), &c, &EnumerationBudget::new(10.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::OutOfScope(_)));
        assert!(err.to_string().contains("k = 1"));
    }

    #[test]
    fn empty_quotient_is_the_model_space() {
        let c = cfg(SpaceForm::Hyperbolic, 0.7);
        let b = EnumerationBudget::new(30.0).unwrap();
        assert_eq!(full_spectrum(&CLSpectrum::default(), &c, &b).unwrap(), model_spectrum(&c, &b).unwrap());
    }

    #[test]
    fn single_geodesic_flat_example() {
        let c = cfg(SpaceForm::Flat, 1.0);
        let cls = CLSpectrum { entries: vec![ComplexLength::new(2.0 * PI, 0.0).unwrap()], name: None };
        let es = full_spectrum(&cls, &c, &EnumerationBudget::new(9.0).unwrap()).unwrap();
        let ls = lengths(&es);
        assert!(ls.iter().any(|l| (l - 2.0 * PI).abs() < 1e-12));
        assert!(ls.iter().any(|l| (l - 2.0 * PI * 2.0_f64.sqrt()).abs() < 1e-12));
        for e in &es {
            let rep = verify_entry(e, &c, &VerifyTolerances::default());
            assert!(rep.passed(), "{:?}", rep.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn merge_groups_close_lengths_and_drops_duplicates() {
        let w = |length: f64, m: u64| Witness { length, detail: WitnessDetail::Circle { m, n: 1, r: 1.0 } };
        let es = merge_witnesses(vec![w(2.0, 3), w(1.0, 1), w(1.0 + 1e-12, 2), w(1.0, 1)]);
        assert_eq!(es.len(), 2);
        assert_eq!(es[0].witnesses.len(), 2);
        assert_eq!(es[0].length, 1.0);
    }

    #[test]
    fn comparison_reports_first_mismatch() {
        let r = compare_lengths([1.0, 2.0, 3.0], [1.0, 2.5, 3.0], 1e-9);
        assert_eq!(r.first_mismatch, Some(Mismatch { index: 1, a: Some(2.0), b: Some(2.5) }));
        let r = compare_lengths([1.0, 2.0], [1.0, 2.0, 3.0], 1e-9);
        assert_eq!(r.first_mismatch.unwrap().a, None);
        assert!(compare_lengths([1.0, 1.0, 2.0], [2.0, 1.0], 1e-9).matched());
    }
}
