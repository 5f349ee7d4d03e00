//! Integer helpers: coprimality and rational detection by continued fractions.

use num_integer::Integer;

pub fn coprime(a: u64, b: u64) -> bool {
    a.gcd(&b) == 1
}

pub fn coprime_signed(a: i64, b: u64) -> bool {
    coprime(a.unsigned_abs(), b)
}

/// Smallest-denominator convergent `m/n` of `x` with `n ≤ max_denominator`
/// and `|n x − m| < tol`, or `None` if no convergent qualifies.
///
/// Convergents are always in lowest terms and `n > 0`; `m` carries the sign.
pub fn detect_rational(x: f64, max_denominator: u64, tol: f64) -> Option<(i64, u64)> {
    if !x.is_finite() || x.abs() > 1e15 {
        return None;
    }
    // h_{-1}/k_{-1} = 1/0, h_{-2}/k_{-2} = 0/1
    let (mut h_prev, mut h) = (0_i128, 1_i128);
    let (mut k_prev, mut k) = (1_i128, 0_i128);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        let a_int = a as i128;
        let h_next = a_int.checked_mul(h)?.checked_add(h_prev)?;
        let k_next = a_int.checked_mul(k)?.checked_add(k_prev)?;
        if k_next > max_denominator as i128 {
            return None;
        }
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
        let residual = (k as f64 * x - h as f64).abs();
        if residual < tol {
            return Some((i64::try_from(h).ok()?, k as u64));
        }
        let frac = rest - a;
        if frac <= 0.0 {
            return None;
        }
        rest = frac.recip();
    }
    None
}
