//! Independent reference computations used to cross-check the closed forms.
//!
//! Nothing here is used by the library proper. Each routine reaches its
//! answer by a different route than the production code: a Taylor-series
//! exponential instead of Padé, finite differences instead of generator
//! algebra, and explicit matrix formulas instead of conjugation.

use crate::helix::{cos_k, sin_k, FrenetData};
use crate::spaceform::{cross_op, Frame, Mat3, Mat4, SpaceForm, Vec3, Vec4};

/// `exp(M)` by scaling and squaring around a 30-term Taylor polynomial.
pub fn taylor_exp(m: &Mat4) -> Mat4 {
    // ∞-norm bound; 30 terms are exact to double precision once it is ≤ 1,
    // and every squaring saved keeps the rounding error from doubling
    let norm = m.abs().max() * 4.0;
    let mut s = 0;
    while norm / 2f64.powi(s) > 1.0 && s < 60 {
        s += 1;
    }
    let a = m / 2f64.powi(s);
    let mut term = Mat4::identity();
    let mut sum = Mat4::identity();
    for j in 1..=30 {
        term = term * a / j as f64;
        sum += term;
    }
    for _ in 0..s {
        sum = sum * sum;
    }
    sum
}

/// Rotation `exp(t L_w)` by the Taylor exponential of the 3×3 block.
fn rot_by_series(w: &Vec3, t: f64) -> Mat3 {
    let mut big = Mat4::zeros();
    big.fixed_view_mut::<3, 3>(1, 1).copy_from(&(cross_op(w) * t));
    taylor_exp(&big).fixed_view::<3, 3>(1, 1).into_owned()
}

/// The moving-frame matrix `Z = (0, -k e₁ᵀ; e₁, L_{τe₁+κe₃})` written out
/// entry by entry.
pub fn frenet_cartan_matrix(kappa: f64, tau: f64, k: SpaceForm) -> Mat4 {
    #[rustfmt::skip]
    let z = Mat4::new(
        0.0, -k.k(), 0.0,    0.0,
        1.0,  0.0,  -kappa,  0.0,
        0.0,  kappa, 0.0,   -tau,
        0.0,  0.0,   tau,    0.0,
    );
    z
}

/// Geometric-form frame `(h(t), F(t) Rot((λ − τ, 0, −κ), t) O)` assembled
/// column by column from the Taylor exponential of the moving-frame matrix.
pub fn geometric_frame(kappa: f64, tau: f64, o: &Mat3, lambda: f64, k: SpaceForm, t: f64) -> Frame {
    let f = taylor_exp(&(frenet_cartan_matrix(kappa, tau, k) * t));
    let turn = rot_by_series(&Vec3::new(lambda - tau, 0.0, -kappa), t) * o;
    let p = f.column(0).into_owned();
    let col = |i: usize| -> Vec4 {
        let v = turn.column(i);
        f * Vec4::new(0.0, v[0], v[1], v[2])
    };
    Frame { p, b: [col(0), col(1), col(2)], k }
}

/// `g⁻¹ V(c, μ) g` for the transvection `g` carrying `e₀` to distance `r`
/// along `e₂`, written out in closed form.
pub fn matrix_w(c: f64, mu: f64, r: f64, k: SpaceForm) -> Mat4 {
    let (co, si, kk) = (cos_k(r, k), sin_k(r, k), k.k());
    #[rustfmt::skip]
    let w = Mat4::new(
        0.0,      -kk * co, 0.0,      -kk * mu * si,
        co,        0.0,     -kk * si,  0.0,
        0.0,       kk * si,  0.0,     -mu * co,
        mu * si,   0.0,      mu * co,  0.0,
    );
    w * c
}

/// Curvature and torsion of the classical Euclidean helix
/// `(a cos s, a sin s, b s)`.
pub fn classical_helix(a: f64, b: f64) -> FrenetData {
    let d = a * a + b * b;
    FrenetData { kappa: a / d, tau: b / d }
}

fn det4(cols: [Vec4; 4]) -> f64 {
    Mat4::from_columns(&cols).determinant()
}

/// Curvature and torsion at `t` of a unit-speed curve in `M_k ⊂ ℝ⁴` from
/// fourth-order central differences with step `h`.
///
/// The acceleration is `γ'' + kγ` and `κ²τ = det(γ, γ', γ'', γ''')`.
pub fn finite_difference_frenet(curve: impl Fn(f64) -> Vec4, k: SpaceForm, t: f64, h: f64) -> FrenetData {
    let f = |j: f64| curve(t + j * h);
    let d = |j: f64| f(j) - f(-j);
    let (d1, d2, d3) = (d(1.0), d(2.0), d(3.0));
    let f0 = f(0.0);
    let v1 = (d1 * 8.0 - d2) / (12.0 * h);
    let v2 = (f(1.0) * 16.0 + f(-1.0) * 16.0 - f0 * 30.0 - f(2.0) - f(-2.0)) / (12.0 * h * h);
    let v3 = (d2 * 8.0 - d1 * 13.0 - d3) / (8.0 * h * h * h);
    let acc = v2 + f0 * k.k();
    let kappa = crate::spaceform::inner_k(&acc, &acc, k).max(0.0).sqrt();
    let tau = det4([f0, v1, v2, v3]) / (kappa * kappa);
    FrenetData { kappa, tau }
}
