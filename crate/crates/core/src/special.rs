//! Special functions used by the tail bounds.
//!
//! The gamma family is delegated to `statrs`; the inverse of the upper
//! incomplete gamma function in its second argument is solved here by
//! bracketing and bisection.

use crate::error::{Error, Result};
use statrs::function::{beta, gamma};

/// Absolute accuracy in `x` of [`upper_inc_gamma_inverse`].
pub const INVERSE_X_TOL: f64 = 1e-10;

pub fn ln_gamma(s: f64) -> f64 {
    gamma::ln_gamma(s)
}

pub fn gamma_fn(s: f64) -> f64 {
    gamma::gamma(s)
}

/// Non-regularized upper incomplete gamma function
/// `Γ(s, x) = ∫_x^∞ u^(s-1) e^(-u) du`.
pub fn upper_inc_gamma(s: f64, x: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::DomainError(format!("Γ(s, x) needs s > 0, got {s}")));
    }
    if !(x >= 0.0) {
        return Err(Error::DomainError(format!("Γ(s, x) needs x ≥ 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(gamma_fn(s));
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let q = gamma::gamma_ur(s, x);
    // Scale in log space; Γ(s) alone overflows for s > 171.
    if q == 0.0 {
        return Ok(0.0);
    }
    Ok((q.ln() + ln_gamma(s)).exp())
}

/// Solves `Γ(s, x) = y` for `x`.
///
/// Needs `0 < y < Γ(s)`. The root is bracketed by doubling and then
/// bisected until the bracket is narrower than [`INVERSE_X_TOL`].
pub fn upper_inc_gamma_inverse(s: f64, y: f64) -> Result<f64> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::DomainError(format!("Γ⁻¹(s, y) needs s > 0, got {s}")));
    }
    let total = gamma_fn(s);
    if !(y > 0.0) || !(y < total) {
        return Err(Error::DomainError(format!(
            "Γ⁻¹({s}, y) needs 0 < y < Γ({s}) = {total}, got {y}"
        )));
    }
    let f = |x: f64| upper_inc_gamma(s, x).map(|v| v - y);

    let mut lo = 0.0;
    let mut hi = s.max(1.0);
    while f(hi)? > 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e300 {
            return Err(Error::DomainError(format!("Γ⁻¹({s}, {y}) failed to bracket")));
        }
    }
    while hi - lo > INVERSE_X_TOL * hi.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn beta_reg(a: f64, b: f64, x: f64) -> f64 {
    beta::beta_reg(a, b, x)
}

/// Binomial coefficient as a float; exact for the sizes used here.
pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut c = 1.0;
    for j in 0..k {
        c = c * (n - j) as f64 / (j + 1) as f64;
    }
    c.round()
}

/// `Σ_{v=0}^{upto} C(n, v)`.
pub fn binomial_prefix_sum(n: u64, upto: u64) -> f64 {
    (0..=upto.min(n)).map(|v| binomial(n, v)).sum()
}
