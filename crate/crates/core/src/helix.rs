//! Helices in the space forms: generators, curvature and torsion, Frenet
//! frames, circles and the arithmetic of periodic helix types.

use std::f64::consts::PI;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::spaceform::{
    algebra_from_parts, exp_at, inner_k, phi, AlgebraElement, Frame, GroupElement, Mat3, Mat4, SpaceForm,
    Vec3, Vec4,
};

/// Curvatures below this are treated as zero (geodesic case, torsion 0).
pub const KAPPA_EPS: f64 = 1e-9;
/// Tolerance on `|V e₀| = 1` when reading curvature off a generator.
pub const UNIT_SPEED_TOL: f64 = 1e-9;

pub fn sin_k(r: f64, k: SpaceForm) -> f64 {
    match k {
        SpaceForm::Spherical => r.sin(),
        SpaceForm::Flat => r,
        SpaceForm::Hyperbolic => r.sinh(),
    }
}

pub fn cos_k(r: f64, k: SpaceForm) -> f64 {
    match k {
        SpaceForm::Spherical => r.cos(),
        SpaceForm::Flat => 1.0,
        SpaceForm::Hyperbolic => r.cosh(),
    }
}

pub fn cot_k(r: f64, k: SpaceForm) -> f64 {
    match k {
        SpaceForm::Spherical => r.cos() / r.sin(),
        SpaceForm::Flat => 1.0 / r,
        SpaceForm::Hyperbolic => 1.0 / r.tanh(),
    }
}

/// Principal inverse of [`sin_k`] on non-negative arguments.
pub fn arcsin_k(s: f64, k: SpaceForm) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(Error::Domain(format!("arcsin_k argument {s} is negative")));
    }
    match k {
        SpaceForm::Spherical if s > 1.0 => Err(Error::Domain(format!("arcsin argument {s} exceeds 1"))),
        SpaceForm::Spherical => Ok(s.asin()),
        SpaceForm::Flat => Ok(s),
        SpaceForm::Hyperbolic => Ok(s.asinh()),
    }
}

/// `R_k(s) = (cos_k s, -k sin_k s; sin_k s, cos_k s)`.
fn rotation_k(s: f64, k: SpaceForm) -> [[f64; 2]; 2] {
    let (c, sn) = (cos_k(s, k), sin_k(s, k));
    [[c, -k.k() * sn], [sn, c]]
}

/// A value together with whether the formula that produced it is backed for
/// this curvature (the axis-helix formulas are only established for k = 0, -1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scoped<T> {
    pub value: T,
    pub certified: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrenetData {
    pub kappa: f64,
    pub tau: f64,
}

/// Helix with an axis: radius `r`, angular speed `mu` and axis speed `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisHelix {
    pub r: f64,
    pub mu: f64,
    pub c: f64,
    pub k: SpaceForm,
}

impl AxisHelix {
    /// The unit-speed helix of radius `r` and angular speed `mu`.
    pub fn unit_speed(r: f64, mu: f64, k: SpaceForm) -> Result<Self> {
        let c = unit_speed_axis_speed(r, mu, k)?;
        Ok(AxisHelix { r, mu, c, k })
    }

    pub fn generator(&self) -> Result<AlgebraElement> {
        standard_helix_generator(self.c, self.mu, self.k)
    }

    /// `p = (cos_k r, 0, sin_k r, 0)`, the starting point of the helix.
    pub fn start(&self) -> Vec4 {
        standard_helix_point(self.r, self.k)
    }

    /// Point at time `t`, evaluated through the block-rotation form.
    pub fn point(&self, t: f64) -> Vec4 {
        standard_helix_block_form(self.c, self.mu, self.r, self.k, t)
    }

    pub fn frenet(&self) -> Result<Scoped<FrenetData>> {
        kappa_tau_from_axis(self.c, self.mu, self.k)
    }
}

fn check_axis_params(c: f64, mu: f64, k: SpaceForm) -> Result<()> {
    if !(c > 0.0) {
        return Err(Error::Domain(format!("axis speed c = {c} must be positive")));
    }
    if k == SpaceForm::Flat && mu == 0.0 {
        return Err(Error::Domain("angular speed must be nonzero in flat space".into()));
    }
    Ok(())
}

/// `V(c, μ) = c (0, -k e₁ᵀ; e₁, L_{μe₁})`.
pub fn standard_helix_generator(c: f64, mu: f64, k: SpaceForm) -> Result<AlgebraElement> {
    check_axis_params(c, mu, k)?;
    Ok(algebra_from_parts(&Vec3::x(), &Vec3::new(mu, 0.0, 0.0), k).scale(c))
}

pub fn standard_helix_point(r: f64, k: SpaceForm) -> Vec4 {
    Vec4::new(cos_k(r, k), 0.0, sin_k(r, k), 0.0)
}

/// `diag(R_k(ct), R₁(cμt)) · (cos_k r, 0, sin_k r, 0)ᵀ`.
pub fn standard_helix_block_form(c: f64, mu: f64, r: f64, k: SpaceForm, t: f64) -> Vec4 {
    let p = standard_helix_point(r, k);
    let a = rotation_k(c * t, k);
    let b = rotation_k(c * mu * t, SpaceForm::Spherical);
    Vec4::new(
        a[0][0] * p[0] + a[0][1] * p[1],
        a[1][0] * p[0] + a[1][1] * p[1],
        b[0][0] * p[2] + b[0][1] * p[3],
        b[1][0] * p[2] + b[1][1] * p[3],
    )
}

/// The transvection along the `e₂` geodesic carrying `e₀` to
/// `(cos_k r, 0, sin_k r, 0)`; it fixes `e₁` and `e₃`.
pub fn radial_translation(r: f64, k: SpaceForm) -> GroupElement {
    let (c, s) = (cos_k(r, k), sin_k(r, k));
    let mut m = Mat4::identity();
    m[(0, 0)] = c;
    m[(2, 0)] = s;
    m[(0, 2)] = -k.k() * s;
    m[(2, 2)] = c;
    GroupElement::new_unchecked(m, k)
}

/// Axis speed of the unit-speed helix with radius `r` and angular speed `mu`:
/// `c = (cos_k² r + μ² sin_k² r)^(-1/2)`.
pub fn unit_speed_axis_speed(r: f64, mu: f64, k: SpaceForm) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("radius r = {r} must be positive")));
    }
    if k == SpaceForm::Flat && mu == 0.0 {
        return Err(Error::Domain("angular speed must be nonzero in flat space".into()));
    }
    let (co, si) = (cos_k(r, k), sin_k(r, k));
    let denom = co * co + mu * mu * si * si;
    if !(denom > 0.0) {
        return Err(Error::Domain(format!("no unit-speed helix with r = {r}, mu = {mu}")));
    }
    Ok(denom.sqrt().recip())
}

/// `κ² = (c²μ² − k)(1 − c²)`, `τ = c²μ` for a unit-speed axis helix.
pub fn kappa_tau_from_axis(c: f64, mu: f64, k: SpaceForm) -> Result<Scoped<FrenetData>> {
    check_axis_params(c, mu, k)?;
    let c2 = c * c;
    let radicand = (c2 * mu * mu - k.k()) * (1.0 - c2);
    if radicand < 0.0 {
        return Err(Error::Domain(format!(
            "negative curvature radicand {radicand} for c = {c}, mu = {mu}, k = {k}"
        )));
    }
    Ok(Scoped {
        value: FrenetData { kappa: radicand.sqrt(), tau: c2 * mu },
        certified: k != SpaceForm::Spherical,
    })
}

fn lower(v: &Vec4) -> Vec3 {
    Vec3::new(v[1], v[2], v[3])
}

/// Curvature and torsion of `t ↦ e^{tV} e₀` from `κ = |V²e₀ + k e₀|` and
/// `κ²τ = ⟨V³e₀, Ve₀ × (V²e₀ + k e₀)⟩`.
pub fn kappa_tau_from_generator(v: &AlgebraElement) -> Result<FrenetData> {
    let k = v.space_form();
    let m = v.matrix();
    let e0 = Vec4::new(1.0, 0.0, 0.0, 0.0);
    let v1 = m * e0;
    let speed = inner_k(&v1, &v1, k).max(0.0).sqrt();
    if (speed - 1.0).abs() > UNIT_SPEED_TOL {
        return Err(Error::NotUnitSpeed { speed });
    }
    let v2 = m * v1;
    let v3 = m * v2;
    let acc = lower(&(v2 + e0 * k.k()));
    let kappa = acc.norm();
    if kappa < KAPPA_EPS {
        return Ok(FrenetData { kappa: 0.0, tau: 0.0 });
    }
    let tau = lower(&v3).dot(&lower(&v1).cross(&acc)) / (kappa * kappa);
    Ok(FrenetData { kappa, tau })
}

/// `Z = (0, -k e₁ᵀ; e₁, L_{τe₁+κe₃})`: the generator whose orbit through `e₀`
/// is the unit-speed helix with curvature `κ`, torsion `τ` and Frenet frame
/// equal to the identity at `t = 0`.
pub fn generator_from_kappa_tau(kappa: f64, tau: f64, k: SpaceForm) -> Result<AlgebraElement> {
    if !(kappa >= 0.0) {
        return Err(Error::Domain(format!("curvature {kappa} must be non-negative")));
    }
    let tau = if kappa < KAPPA_EPS { 0.0 } else { tau };
    Ok(algebra_from_parts(&Vec3::x(), &Vec3::new(tau, 0.0, kappa), k))
}

/// Frenet frame `F(t) = dφ_t ∘ F(0)` of `t ↦ e^{tZ} e₀`, `φ_t = e^{tZ}`.
pub fn frenet_frame(z: &AlgebraElement, t: f64) -> Frame {
    phi(&exp_at(z, t))
}

/// Frenet basis `(T, N, B)` at `e₀` of the unit-speed orbit `e^{tV} e₀`, as a
/// rotation matrix acting on `T_{e₀}M ≅ ℝ³`.
pub fn initial_frenet_basis(v: &AlgebraElement) -> Result<Mat3> {
    let k = v.space_form();
    let m = v.matrix();
    let e0 = Vec4::new(1.0, 0.0, 0.0, 0.0);
    let v1 = m * e0;
    let speed = inner_k(&v1, &v1, k).max(0.0).sqrt();
    if (speed - 1.0).abs() > UNIT_SPEED_TOL {
        return Err(Error::NotUnitSpeed { speed });
    }
    let t = lower(&v1);
    let acc = lower(&(m * v1 + e0 * k.k()));
    let kappa = acc.norm();
    if kappa < KAPPA_EPS {
        return Err(Error::Domain("Frenet basis of a geodesic is not determined by its generator".into()));
    }
    let n = acc / kappa;
    let b = t.cross(&n);
    Ok(Mat3::from_columns(&[t, n, b]))
}

/// Length `2π sin_k r` and curvature `cot_k r` of the circle of radius `r`.
pub fn circle_data(r: f64, k: SpaceForm) -> Result<(f64, f64)> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("circle radius {r} must be positive")));
    }
    if k == SpaceForm::Spherical && r >= PI {
        return Err(Error::Domain(format!("circle radius {r} must be smaller than pi on the sphere")));
    }
    Ok((2.0 * PI * sin_k(r, k), cot_k(r, k)))
}

/// Complex length `ℓ + iθ` of a periodic geodesic.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
pub struct ComplexLength {
    pub ell: f64,
    pub theta: f64,
}

impl ComplexLength {
    pub fn new(ell: f64, theta: f64) -> Result<Self> {
        if !(ell > 0.0 && ell.is_finite()) {
            return Err(Error::Domain(format!("length {ell} must be positive and finite")));
        }
        if !(0.0..2.0 * PI).contains(&theta) {
            return Err(Error::Domain(format!("holonomy {theta} must lie in [0, 2pi)")));
        }
        Ok(ComplexLength { ell, theta })
    }
}

/// Periodic helix type `(ℓ + iθ, q, p)`: the helix turns `p` times around an
/// axis of complex length `ℓ + iθ` traversed `q` times.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelixType {
    pub cl: ComplexLength,
    pub q: u64,
    pub p: i64,
}

impl HelixType {
    pub fn new(cl: ComplexLength, q: u64, p: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Domain("q must be positive".into()));
        }
        if p.unsigned_abs().gcd(&q) != 1 {
            return Err(Error::Domain(format!("(q, p) = ({q}, {p}) are not coprime")));
        }
        Ok(HelixType { cl, q, p })
    }

    /// `μ = (2πp/q − θ)/ℓ`.
    pub fn angular_speed(&self) -> f64 {
        (2.0 * PI * self.p as f64 / self.q as f64 - self.cl.theta) / self.cl.ell
    }
}

/// Length `L = qℓ/c` and angular speed `μ = (2πp/q − θ)/ℓ` of the unit-speed
/// helix of type `ht` whose axis has speed `c`.
pub fn helix_type_params(ht: &HelixType, c: f64) -> Result<(f64, f64)> {
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::Domain(format!("axis speed {c} must lie in (0, 1)")));
    }
    Ok((ht.q as f64 * ht.cl.ell / c, ht.angular_speed()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaceform::{exp_at, screw_generator};
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

    #[test]
    fn trig_k_examples() {
        assert_eq!(sin_k(0.5, SpaceForm::Flat), 0.5);
        for r in [0.1, 1.0, 7.0] {
            assert_eq!(cos_k(r, SpaceForm::Flat), 1.0);
        }
        assert_relative_eq!(arcsin_k(1.3_f64.sinh(), SpaceForm::Hyperbolic).unwrap(), 1.3, epsilon = 1e-15);
        assert!(arcsin_k(1.5, SpaceForm::Spherical).is_err());
        assert!(arcsin_k(-0.1, SpaceForm::Flat).is_err());
        assert!(arcsin_k(f64::NAN, SpaceForm::Hyperbolic).is_err());
    }

    #[test]
    fn pythagorean_identity() {
        for k in SpaceForm::ALL {
            for i in 0..1000 {
                let r = -5.0 + 10.0 * (i as f64) / 1000.0;
                let (c, s) = (cos_k(r, k), sin_k(r, k));
                let lhs = c * c + k.k() * s * s;
                let scale = (c * c).max(1.0);
                assert!((lhs - 1.0).abs() <= 1e-14 * scale, "k={k} r={r} lhs={lhs}");
            }
        }
    }

    #[test]
    fn generator_rejects_flat_zero_mu() {
        assert!(standard_helix_generator(0.5, 0.0, SpaceForm::Flat).is_err());
        assert!(standard_helix_generator(0.0, 1.0, SpaceForm::Hyperbolic).is_err());
        assert!(standard_helix_generator(0.5, 0.0, SpaceForm::Hyperbolic).is_ok());
    }

    #[test]
    fn degenerate_radius_traces_axis() {
        for k in SpaceForm::ALL {
            let (c, mu) = (0.8, 1.7);
            let v = standard_helix_generator(c, mu, k).unwrap();
            let e0 = Vec4::new(1.0, 0.0, 0.0, 0.0);
            for t in [0.3, 1.1, 2.5] {
                let x = exp_at(&v, t).act(&e0);
                let axis = Vec4::new(cos_k(c * t, k), sin_k(c * t, k), 0.0, 0.0);
                assert!((x - axis).norm() < 1e-13);
                assert!((standard_helix_block_form(c, mu, 0.0, k, t) - axis).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn flat_helix_by_hand() {
        let c = FRAC_1_SQRT_2;
        for t in [0.0, 0.4, 2.0, 5.5] {
            let x = standard_helix_block_form(c, 1.0, 1.0, SpaceForm::Flat, t);
            let expected = Vec4::new(1.0, c * t, (c * t).cos(), (c * t).sin());
            assert!((x - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn orbit_matches_block_form() {
        for k in SpaceForm::ALL {
            let (c, mu, r) = (0.6, -1.3, 0.9);
            let v = standard_helix_generator(c, mu, k).unwrap();
            let p = standard_helix_point(r, k);
            for t in [0.2, 1.7, 3.9, 6.1] {
                let a = exp_at(&v, t).act(&p);
                let b = standard_helix_block_form(c, mu, r, k, t);
                assert!((a - b).norm() < 1e-12 * b.norm().max(1.0), "k={k} t={t}");
            }
        }
    }

    #[test]
    fn unit_speed_examples() {
        assert_relative_eq!(unit_speed_axis_speed(1.0, 1.0, SpaceForm::Flat).unwrap(), FRAC_1_SQRT_2, epsilon = 1e-15);
        let r = 1.0_f64.asinh();
        assert_relative_eq!(
            unit_speed_axis_speed(r, 2.0, SpaceForm::Hyperbolic).unwrap(),
            1.0 / 6.0_f64.sqrt(),
            epsilon = 1e-15
        );
        for k in SpaceForm::ALL {
            let c = unit_speed_axis_speed(1e-9, 3.0, k).unwrap();
            assert!((c - 1.0).abs() < 1e-15);
        }
        assert!(unit_speed_axis_speed(0.0, 1.0, SpaceForm::Flat).is_err());
        assert!(unit_speed_axis_speed(1.0, 0.0, SpaceForm::Flat).is_err());
    }

    #[test]
    fn axis_speed_is_monotone_in_radius() {
        for k in [SpaceForm::Flat, SpaceForm::Hyperbolic] {
            for mu in [0.3, 1.0, -2.5] {
                let mut prev = 1.0;
                for i in 1..200 {
                    let c = unit_speed_axis_speed(0.05 * i as f64, mu, k).unwrap();
                    assert!(c > 0.0 && c < 1.0);
                    assert!(c < prev);
                    prev = c;
                }
            }
        }
    }

    #[test]
    fn kappa_tau_from_axis_examples() {
        let f = kappa_tau_from_axis(FRAC_1_SQRT_2, 1.0, SpaceForm::Flat).unwrap();
        assert!(f.certified);
        assert_relative_eq!(f.value.kappa, 0.5, epsilon = 1e-15);
        assert_relative_eq!(f.value.tau, 0.5, epsilon = 1e-15);

        let h = kappa_tau_from_axis(1.0 / 6.0_f64.sqrt(), 2.0, SpaceForm::Hyperbolic).unwrap();
        assert_relative_eq!(h.value.tau, 1.0 / 3.0, epsilon = 1e-15);
        assert_relative_eq!(h.value.kappa, 50.0_f64.sqrt() / 6.0, epsilon = 1e-15);

        let near = kappa_tau_from_axis(1.0 - 1e-12, 2.0, SpaceForm::Flat).unwrap();
        assert!(near.value.kappa < 1e-5);

        let s = kappa_tau_from_axis(0.5, 3.0, SpaceForm::Spherical).unwrap();
        assert!(!s.certified);
        assert!(kappa_tau_from_axis(1.5, 0.1, SpaceForm::Flat).is_err());
    }

    #[test]
    fn kappa_tau_from_generator_examples() {
        for k in SpaceForm::ALL {
            let p = screw_generator(&Vec3::x(), 0.0, k);
            assert_eq!(kappa_tau_from_generator(&p).unwrap(), FrenetData { kappa: 0.0, tau: 0.0 });
        }
        let helix = AxisHelix::unit_speed(1.0, 1.0, SpaceForm::Flat).unwrap();
        let w = helix.generator().unwrap().conjugate_by(&radial_translation(1.0, SpaceForm::Flat));
        let f = kappa_tau_from_generator(&w).unwrap();
        assert_relative_eq!(f.kappa, 0.5, epsilon = 1e-14);
        assert_relative_eq!(f.tau, 0.5, epsilon = 1e-14);

        let z = generator_from_kappa_tau(0.8, -0.3, SpaceForm::Hyperbolic).unwrap();
        let g = kappa_tau_from_generator(&z).unwrap();
        assert_relative_eq!(g.kappa, 0.8, epsilon = 1e-15);
        assert_relative_eq!(g.tau, -0.3, epsilon = 1e-15);

        let slow = screw_generator(&(Vec3::x() * 2.0), 0.0, SpaceForm::Flat);
        assert!(matches!(kappa_tau_from_generator(&slow), Err(Error::NotUnitSpeed { .. })));
    }

    #[test]
    fn generator_from_kappa_tau_examples() {
        for k in SpaceForm::ALL {
            let z = generator_from_kappa_tau(0.0, 0.0, k).unwrap();
            assert_eq!(z, screw_generator(&Vec3::x(), 0.0, k));
            // torsion is forced to zero on geodesics
            assert_eq!(generator_from_kappa_tau(0.0, 5.0, k).unwrap(), z);
        }
        assert!(generator_from_kappa_tau(-0.1, 0.0, SpaceForm::Flat).is_err());
    }

    #[test]
    fn frenet_frame_starts_at_identity() {
        for k in SpaceForm::ALL {
            let z = generator_from_kappa_tau(1.2, 0.4, k).unwrap();
            assert_eq!(frenet_frame(&z, 0.0), Frame::identity(k));
            let basis = initial_frenet_basis(&z).unwrap();
            assert!((basis - Mat3::identity()).abs().max() < 1e-15);
        }
    }

    #[test]
    fn circle_examples() {
        let (len, kappa) = circle_data(1.0, SpaceForm::Flat).unwrap();
        assert_relative_eq!(len, 2.0 * PI);
        assert_relative_eq!(kappa, 1.0);
        let (len, kappa) = circle_data(FRAC_PI_2, SpaceForm::Spherical).unwrap();
        assert_relative_eq!(len, 2.0 * PI);
        assert!(kappa.abs() < 1e-16);
        let (len, kappa) = circle_data(1.0, SpaceForm::Hyperbolic).unwrap();
        assert_relative_eq!(len, 7.384_006_872_882_645, epsilon = 1e-12);
        assert_relative_eq!(kappa, 1.313_035_285_499_331_5, epsilon = 1e-12);
        assert!(circle_data(PI, SpaceForm::Spherical).is_err());
        assert!(circle_data(4.0, SpaceForm::Flat).is_ok());
    }

    #[test]
    fn helix_type_examples() {
        let cl = ComplexLength::new(2.0 * PI, 0.0).unwrap();
        let ht = HelixType::new(cl, 1, 1).unwrap();
        let (l, mu) = helix_type_params(&ht, FRAC_1_SQRT_2).unwrap();
        assert_relative_eq!(l, 2.0 * PI * 2.0_f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(mu, 1.0, epsilon = 1e-15);

        let cl = ComplexLength::new(1.7, 0.4).unwrap();
        let (_, mu) = helix_type_params(&HelixType::new(cl, 1, 0).unwrap(), 0.3).unwrap();
        assert_relative_eq!(mu, -0.4 / 1.7, epsilon = 1e-15);

        let cl = ComplexLength::new(1.0, PI).unwrap();
        let (l, mu) = helix_type_params(&HelixType::new(cl, 2, 3).unwrap(), 0.5).unwrap();
        assert_relative_eq!(l, 4.0, epsilon = 1e-15);
        assert_relative_eq!(mu, 2.0 * PI, epsilon = 1e-14);

        assert!(HelixType::new(cl, 2, 4).is_err());
        assert!(HelixType::new(cl, 2, 0).is_err());
        assert!(HelixType::new(cl, 0, 1).is_err());
        assert!(ComplexLength::new(1.0, 2.0 * PI).is_err());
        assert!(ComplexLength::new(0.0, 0.0).is_err());
    }

    #[test]
    fn spherical_orbit_closes_for_rational_ratio() {
        let k = SpaceForm::Spherical;
        // μ = 3/2 in lowest terms: the orbit closes at ct = 2π·2
        let (c, mu, r) = (0.7, 1.5, 0.8);
        let v = standard_helix_generator(c, mu, k).unwrap();
        let p = standard_helix_point(r, k);
        let period = 2.0 * PI * 2.0 / c;
        assert!((exp_at(&v, period).act(&p) - p).norm() < 1e-9);
        assert!((exp_at(&v, period / 2.0).act(&p) - p).norm() > 1e-3);
    }
}
