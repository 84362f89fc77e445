//! Numeric checks of the usual stochastic order, the hazard rate order and
//! IFR/DFR aging classes for discrete lifetimes, and of stochastic
//! ordering between two systems.
//!
//! Orders quantify over all `t`; on unbounded supports the checks stop at
//! a horizon beyond which both survivals are below `eps`, and the verdict
//! reports that residual mass.

use crate::distributions::DiscreteLifetime;
use crate::error::{Error, Result};
use crate::orderstats::{Kernel, SystemSpec};
use serde::Serialize;

/// Slack allowed in `sf_a(t) ≤ sf_b(t)`.
const ST_TOL: f64 = 1e-12;
/// Slack allowed in the hazard-ratio cross-product.
const HR_TOL: f64 = 1e-15;
/// Hard cap on horizons, in case a survival decays extremely slowly.
const MAX_HORIZON: i64 = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    St,
    Hr,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderVerdict {
    pub relation: Relation,
    pub holds: bool,
    pub horizon: i64,
    /// Largest survival beyond the horizon.
    pub residual_mass: f64,
    pub counterexample: Option<i64>,
}

/// First `t ≥ 0` where both survivals are at most `eps`.
fn horizon(a: &DiscreteLifetime, b: &DiscreteLifetime, eps: f64) -> i64 {
    match (a.support_max(), b.support_max()) {
        (Some(x), Some(y)) => x.max(y).max(0),
        _ => {
            let ha = a.inverse_sf(eps);
            let hb = b.inverse_sf(eps);
            ha.max(hb).min(MAX_HORIZON)
        }
    }
}

/// `a ≤_st b`: `P(a > t) ≤ P(b > t)` for every `t`.
pub fn st_leq(a: &DiscreteLifetime, b: &DiscreteLifetime, eps: f64) -> OrderVerdict {
    let h = horizon(a, b, eps);
    let counterexample = (0..=h).find(|&t| a.sf(t) > b.sf(t) + ST_TOL);
    OrderVerdict {
        relation: Relation::St,
        holds: counterexample.is_none(),
        horizon: h,
        residual_mass: a.sf(h).max(b.sf(h)),
        counterexample,
    }
}

/// `a ≤_hr b`: `P(b > t) / P(a > t)` non-decreasing, with `x/0 = ∞`,
/// checked as `F̄_b(t+1) F̄_a(t) ≥ F̄_b(t) F̄_a(t+1)`.
pub fn hr_leq(a: &DiscreteLifetime, b: &DiscreteLifetime, eps: f64) -> OrderVerdict {
    let h = horizon(a, b, eps);
    let counterexample = (-1..h).find(|&t| {
        let (sa, sa1) = (a.sf(t), a.sf(t + 1));
        let (sb, sb1) = (b.sf(t), b.sf(t + 1));
        if sa == 0.0 && sb == 0.0 {
            return false;
        }
        sb1 * sa < sb * sa1 - HR_TOL
    });
    OrderVerdict {
        relation: Relation::Hr,
        holds: counterexample.is_none(),
        horizon: h,
        residual_mass: a.sf(h).max(b.sf(h)),
        counterexample,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AgingClass {
    Ifr,
    Dfr,
    /// Constant hazard.
    Both,
    Neither,
    /// No decision within the horizon.
    Unknown(i64),
}

/// Relative slack when comparing consecutive hazards.
const HAZARD_TOL: f64 = 1e-12;

/// IFR/DFR class. Parametric families are classified from their
/// parameters; finite mass vectors by their hazards `p(t) / F̄(t-1)`.
pub fn ifr_class(dist: &DiscreteLifetime) -> AgingClass {
    match dist {
        DiscreteLifetime::Geometric(_) => AgingClass::Both,
        DiscreteLifetime::NegBinomial(nb) if nb.r() == 1 => AgingClass::Both,
        DiscreteLifetime::NegBinomial(_) => AgingClass::Ifr,
        DiscreteLifetime::DiscreteWeibull(w) if w.beta() > 1.0 => AgingClass::Ifr,
        DiscreteLifetime::DiscreteWeibull(w) if w.beta() < 1.0 => AgingClass::Dfr,
        DiscreteLifetime::DiscreteWeibull(_) => AgingClass::Both,
        DiscreteLifetime::FinitePmf(_) => {
            let n = dist.support_max().unwrap();
            // The aging classes are defined for supports {0, ..., N}.
            if (0..=n).any(|t| dist.pmf(t) == 0.0) {
                return AgingClass::Neither;
            }
            classify_hazards(dist, n)
        }
        DiscreteLifetime::Residual(_) => match dist.support_max() {
            Some(n) => {
                if (0..=n).any(|t| dist.pmf(t) == 0.0) {
                    AgingClass::Neither
                } else {
                    classify_hazards(dist, n)
                }
            }
            None => {
                let h = dist.inverse_sf(1e-12);
                match classify_hazards(dist, h) {
                    AgingClass::Neither => AgingClass::Neither,
                    _ => AgingClass::Unknown(h),
                }
            }
        },
    }
}

fn classify_hazards(dist: &DiscreteLifetime, n: i64) -> AgingClass {
    let hazards: Vec<f64> = (0..=n).map(|t| dist.pmf(t) / dist.sf(t - 1)).collect();
    let mut up = true;
    let mut down = true;
    for w in hazards.windows(2) {
        let tol = HAZARD_TOL * w[0].abs().max(w[1].abs());
        if w[1] < w[0] - tol {
            up = false;
        }
        if w[1] > w[0] + tol {
            down = false;
        }
    }
    match (up, down) {
        (true, true) => AgingClass::Both,
        (true, false) => AgingClass::Ifr,
        (false, true) => AgingClass::Dfr,
        (false, false) => AgingClass::Neither,
    }
}

/// Checks `T_A ≤_st T_B` by comparing reliability curves up to the first
/// `t` where both are at most `eps`.
pub fn system_st_compare(a: &SystemSpec, b: &SystemSpec, eps: f64) -> Result<OrderVerdict> {
    if a.n() != b.n() || a.k() != b.k() {
        return Err(Error::DimensionMismatch(a.n(), a.k(), b.n(), b.k()));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    // Grow the horizon geometrically until both tails are below eps.
    let mut h = 64i64;
    loop {
        let ka = Kernel::new(a, h);
        let kb = Kernel::new(b, h);
        let ra: Vec<f64> = (0..=h).map(|t| ka.reliability(t)).collect();
        let rb: Vec<f64> = (0..=h).map(|t| kb.reliability(t)).collect();
        let end = (0..=h as usize).find(|&t| ra[t] <= eps && rb[t] <= eps);
        if let Some(end) = end.or(if h >= MAX_HORIZON { Some(h as usize) } else { None }) {
            let counterexample = (0..=end).find(|&t| ra[t] > rb[t] + ST_TOL).map(|t| t as i64);
            return Ok(OrderVerdict {
                relation: Relation::St,
                holds: counterexample.is_none(),
                horizon: end as i64,
                residual_mass: ra[end].max(rb[end]),
                counterexample,
            });
        }
        h *= 2;
    }
}
