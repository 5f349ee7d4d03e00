//! Sub-Riemannian geodesics of the screw distribution `D^λ` on `G_k ≅ SO(M_k)`.
//!
//! Two closed forms are provided. The Lie form through the identity is
//!
//! ```text
//! γ_{x,y}(t) = exp(t (0, -k xᵀ; x, L_{λx+y})) · exp(t diag(0, -L_y))
//! ```
//!
//! and the geometric form is `(h(t), F(t) Rot((λ-τ, 0, -κ), t) O)`, where `h`
//! is the unit-speed helix with curvature `κ`, torsion `τ` and identity Frenet
//! frame at `e₀`, and `F` its Frenet frame. Both are instances of
//! `t ↦ g · e^{tZ} · diag(1, R(t))` with `R(t) ∈ SO(3)`, which is what
//! [`GeodesicSpec`] stores.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::helix::{generator_from_kappa_tau, KAPPA_EPS};
use crate::spaceform::{
    algebra_from_parts, embed_rotation, exp_at, phi, rot, screw_generator, AlgebraElement, Frame, GroupElement,
    Mat3, Mat4, SpaceForm, Vec3,
};

/// Central-difference step used for horizontality checks.
pub const FD_STEP: f64 = 1e-4;
/// Largest off-distribution residual accepted as horizontal.
pub const HORIZONTAL_TOL: f64 = 1e-6;

/// Curvature of the space form together with the pitch `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScrewConfig {
    k: SpaceForm,
    lambda: f64,
}

impl ScrewConfig {
    /// Rejects the pitches with `λ² = k`, for which `D^λ` is not bracket
    /// generating.
    pub fn new(k: SpaceForm, lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || (lambda * lambda - k.k()).abs() < 1e-12 {
            return Err(Error::DegenerateScrew { k: k.label(), lambda });
        }
        Ok(ScrewConfig { k, lambda })
    }

    pub fn space_form(&self) -> SpaceForm {
        self.k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `λ² − k`, the denominator of every closing formula.
    pub fn pitch_gap(&self) -> f64 {
        self.lambda * self.lambda - self.k.k()
    }
}

/// `γ_{x,y}(t)`.
pub fn geodesic_lie(x: &Vec3, y: &Vec3, cfg: &ScrewConfig, t: f64) -> GroupElement {
    GeodesicSpec::lie(*x, *y, *cfg).at(t)
}

/// `(h(t), F(t) Rot((λ − τ, 0, −κ), t) O)`.
pub fn geodesic_geometric(kappa: f64, tau: f64, o: &Mat3, cfg: &ScrewConfig, t: f64) -> Result<Frame> {
    Ok(GeodesicSpec::geometric(kappa, tau, *o, *cfg)?.frame_at(t))
}

/// Rotation axis `(λ − τ, 0, −κ)` of the fibre factor, in Frenet coordinates.
pub fn fibre_rotation_axis(kappa: f64, tau: f64, lambda: f64) -> Vec3 {
    Vec3::new(lambda - tau, 0.0, -kappa)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeodesicForm {
    Lie { x: Vec3, y: Vec3 },
    Geometric { kappa: f64, tau: f64, o: Mat3 },
}

/// A sub-Riemannian geodesic `t ↦ basepoint · γ(d t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicSpec {
    pub form: GeodesicForm,
    /// Reparametrisation factor `d ≥ 0`.
    pub speed: f64,
    pub cfg: ScrewConfig,
    pub basepoint: GroupElement,
    z: AlgebraElement,
}

impl GeodesicSpec {
    pub fn lie(x: Vec3, y: Vec3, cfg: ScrewConfig) -> Self {
        let k = cfg.space_form();
        let z = algebra_from_parts(&x, &(x * cfg.lambda() + y), k);
        GeodesicSpec {
            form: GeodesicForm::Lie { x, y },
            speed: 1.0,
            cfg,
            basepoint: GroupElement::identity(k),
            z,
        }
    }

    pub fn geometric(kappa: f64, tau: f64, o: Mat3, cfg: ScrewConfig) -> Result<Self> {
        let k = cfg.space_form();
        let z = generator_from_kappa_tau(kappa, tau, k)?;
        if (o.transpose() * o - Mat3::identity()).abs().max() > 1e-10 || o.determinant() <= 0.0 {
            return Err(Error::Domain("O must be a rotation matrix".into()));
        }
        let tau = if kappa < KAPPA_EPS { 0.0 } else { tau };
        Ok(GeodesicSpec {
            form: GeodesicForm::Geometric { kappa, tau, o },
            speed: 1.0,
            cfg,
            basepoint: GroupElement::identity(k),
            z,
        })
    }

    pub fn with_speed(mut self, d: f64) -> Result<Self> {
        if !(d >= 0.0 && d.is_finite()) {
            return Err(Error::Domain(format!("reparametrisation factor {d} must be non-negative")));
        }
        self.speed = d;
        Ok(self)
    }

    pub fn with_basepoint(mut self, g: GroupElement) -> Self {
        debug_assert_eq!(g.space_form(), self.cfg.space_form());
        self.basepoint = g;
        self
    }

    /// Generator `Z` of the helix factor `e^{tZ}`.
    pub fn helix_generator(&self) -> &AlgebraElement {
        &self.z
    }

    /// Right factor `R(t) ∈ SO(3)` at the (unscaled) time `t`.
    fn right_factor(&self, t: f64) -> Mat3 {
        match self.form {
            GeodesicForm::Lie { y, .. } => rot(&(-y), t),
            GeodesicForm::Geometric { kappa, tau, o } => rot(&fibre_rotation_axis(kappa, tau, self.cfg.lambda()), t) * o,
        }
    }

    /// Horizontal control `x` at `t = 0`; its norm times `d` is the speed.
    pub fn initial_control(&self) -> Vec3 {
        match self.form {
            GeodesicForm::Lie { x, .. } => x * self.speed,
            GeodesicForm::Geometric { o, .. } => o.transpose() * Vec3::x() * self.speed,
        }
    }

    pub fn at(&self, t: f64) -> GroupElement {
        let s = self.speed * t;
        let core = exp_at(&self.z, s) * GroupElement::rotation(&self.right_factor(s), self.cfg.space_form());
        self.basepoint * core
    }

    pub fn frame_at(&self, t: f64) -> Frame {
        phi(&self.at(t))
    }

    /// Samples the trajectory on `times`; evaluation is parallel, output order
    /// follows `times`.
    pub fn sample(&self, times: &[f64]) -> Vec<(f64, GroupElement)> {
        times.par_iter().map(|&t| (t, self.at(t))).collect()
    }
}

/// The speed of a geodesic: `d |x|`, constant along the curve.
pub fn speed(spec: &GeodesicSpec) -> f64 {
    spec.initial_control().norm()
}

/// A curve in `G_k` that can be differentiated numerically.
pub trait GroupPath {
    fn space_form(&self) -> SpaceForm;

    fn at(&self, t: f64) -> GroupElement;

    /// `γ(t)⁻¹ γ(t + s)`. Implementors with closed forms should override this
    /// to avoid multiplying large matrices that nearly cancel.
    fn increment(&self, t: f64, s: f64) -> Mat4 {
        *(self.at(t).inverse() * self.at(t + s)).matrix()
    }
}

impl GroupPath for GeodesicSpec {
    fn space_form(&self) -> SpaceForm {
        self.cfg.space_form()
    }

    fn at(&self, t: f64) -> GroupElement {
        GeodesicSpec::at(self, t)
    }

    fn increment(&self, t: f64, s: f64) -> Mat4 {
        let (a, b) = (self.speed * t, self.speed * (t + s));
        let left = embed_rotation(&self.right_factor(a).transpose());
        let right = embed_rotation(&self.right_factor(b));
        left * exp_at(&self.z, b - a).matrix() * right
    }
}

/// Adapter turning a closure into a [`GroupPath`].
pub struct FnPath<F> {
    k: SpaceForm,
    f: F,
}

impl<F: Fn(f64) -> GroupElement> FnPath<F> {
    pub fn new(k: SpaceForm, f: F) -> Self {
        FnPath { k, f }
    }
}

impl<F: Fn(f64) -> GroupElement> GroupPath for FnPath<F> {
    fn space_form(&self) -> SpaceForm {
        self.k
    }

    fn at(&self, t: f64) -> GroupElement {
        (self.f)(t)
    }
}

/// Central-difference approximation of `γ(t)⁻¹ γ'(t)`, error `O(h²)`.
pub fn left_log_derivative<P: GroupPath + ?Sized>(path: &P, t: f64, h: f64) -> AlgebraElement {
    let m = (path.increment(t, h) - path.increment(t, -h)) / (2.0 * h);
    AlgebraElement::new_unchecked(m, path.space_form())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizontalitySample {
    pub t: f64,
    /// Recovered control `x(t)` with `γ⁻¹γ' ≈ D^λ(x)`.
    pub control: Vec3,
    /// Frobenius norm of `γ⁻¹γ' − D^λ(x)`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HorizontalityReport {
    pub samples: Vec<HorizontalitySample>,
    pub max_residual: f64,
}

impl HorizontalityReport {
    pub fn is_horizontal(&self, tol: f64) -> bool {
        self.max_residual < tol
    }

    /// Largest deviation of `|x(t)|` from `expected`.
    pub fn max_speed_deviation(&self, expected: f64) -> f64 {
        self.samples.iter().map(|s| (s.control.norm() - expected).abs()).fold(0.0, f64::max)
    }
}

/// Splits the left log-derivative at each time into its `D^λ` component and
/// the remainder.
pub fn horizontality_check_path<P: GroupPath + Sync + ?Sized>(
    path: &P,
    lambda: f64,
    times: &[f64],
    h: f64,
) -> HorizontalityReport {
    let k = path.space_form();
    let samples: Vec<HorizontalitySample> = times
        .par_iter()
        .map(|&t| {
            let omega = left_log_derivative(path, t, h);
            let control = omega.translation_part();
            let projected = screw_generator(&control, lambda, k);
            let residual = (omega.matrix() - projected.matrix()).norm();
            HorizontalitySample { t, control, residual }
        })
        .collect();
    let max_residual = samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    HorizontalityReport { samples, max_residual }
}

pub fn horizontality_check(spec: &GeodesicSpec, times: &[f64]) -> HorizontalityReport {
    horizontality_check_path(spec, spec.cfg.lambda(), times, FD_STEP)
}

/// Speed of an arbitrary path measured from its left log-derivative; fails if
/// the path is not horizontal on `times`.
pub fn measured_speed<P: GroupPath + Sync + ?Sized>(path: &P, lambda: f64, times: &[f64]) -> Result<f64> {
    let report = horizontality_check_path(path, lambda, times, FD_STEP);
    if let Some(bad) = report.samples.iter().find(|s| s.residual >= HORIZONTAL_TOL) {
        return Err(Error::NotHorizontal { residual: bad.residual, t: bad.t });
    }
    let n = report.samples.len().max(1) as f64;
    Ok(report.samples.iter().map(|s| s.control.norm()).sum::<f64>() / n)
}
