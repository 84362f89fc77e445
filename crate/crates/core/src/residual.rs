//! Residual lifetimes of a used system under three conditionings:
//! `T > t` (usual), `X_{1:n} > t` (system level: no component has failed)
//! and `X_{n-k+1:n} > t` (the k-out-of-n part still works).

use crate::distributions::DiscreteLifetime;
use crate::error::{Error, Result};
use crate::lifetime::{expected_T, generic_tail, generic_truncation, AccuracyBudget, Envelope, TruncationRule};
use crate::orderstats::{Kernel, SystemSpec};
use rayon::prelude::*;
use serde::Serialize;

/// Conditioning probabilities below this are reported as gaps.
pub const GAP_THRESHOLD: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CurveKind {
    Reliability,
    UsualMrl,
    SystemLevelMrl,
    WorkingMrl,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    pub t: i64,
    /// `None` marks a gap: the conditioning event is too improbable.
    pub value: Option<f64>,
    pub certified_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Curve {
    pub kind: CurveKind,
    pub points: Vec<CurvePoint>,
}

fn conditioning(p: f64) -> Result<f64> {
    if p > 0.0 {
        Ok(p)
    } else {
        Err(Error::ConditioningOnNullEvent(p))
    }
}

/// `P(T - t > s | T > t)`.
pub fn usual_residual_sf(sys: &SystemSpec, t: i64, s: i64) -> Result<f64> {
    let kernel = Kernel::new(sys, t + s.max(0));
    let p = conditioning(kernel.reliability(t))?;
    if s < 0 {
        return Ok(1.0);
    }
    Ok((kernel.reliability(t + s) / p).min(1.0))
}

/// Truncation for `(1/P) Σ_{s=t}^{t0} a(s)` where `a(s) ≤ P(T > s)`,
/// with the tail at most `d·P`.
fn conditional_truncation(sys: &SystemSpec, t: i64, p: f64, d: f64) -> AccuracyBudget {
    if sys.k() >= 2 {
        let b = generic_truncation(sys, d * p);
        let t0 = b.t0.max(t);
        return AccuracyBudget { d, t0, certified_error: generic_tail(sys, t0) / p, ..b };
    }
    // k = 1: P(X + Z > s) ≤ P(X > s/2) + P(Z > s/2), so with
    // m = ⌊(t0+1)/2⌋ the tail is at most
    // 2[(2^n - 1) Σ_{j≥m} max_i F̄_i(j) + Σ_{j≥m} Ḡ(j)].
    let env = Envelope::new(sys.active());
    let z = sys.standby();
    let factor = 2f64.powi(sys.n() as i32) - 1.0;
    let quarter = d * p / 4.0;
    let holds = |m: i64| z.tail_bound(m - 1) <= quarter && factor * env.bound(m - 1) <= quarter;
    let guess = (z.tail_bound_inverse(quarter) + 1).max(env.inverse(quarter / factor) + 1);
    let m = crate::distributions::refine_monotone_index(guess, holds);
    let t0 = (2 * m - 1).max(t).max(0);
    let m = (t0 + 1) / 2;
    let err = 2.0 * (factor * env.bound(m - 1) + z.tail_bound(m - 1)) / p;
    AccuracyBudget { d, t0, rule: TruncationRule::ParallelSplit, envelope: env.kind(), certified_error: err }
}

fn check_d(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("error budget must be positive and finite, got {d}")))
    }
}

/// `E(T - t | T > t) ≈ (1/P(T>t)) Σ_{s=t}^{t0} P(T > s)`.
pub fn usual_mrl(sys: &SystemSpec, t: i64, d: f64) -> Result<(f64, AccuracyBudget)> {
    check_d(d)?;
    let t = t.max(0);
    let p = conditioning(Kernel::new(sys, t).reliability(t))?;
    let budget = conditional_truncation(sys, t, p, d);
    let kernel = Kernel::new(sys, budget.t0);
    let rows: Vec<f64> = (t..=budget.t0).into_par_iter().map(|s| kernel.reliability(s)).collect();
    Ok((rows.iter().sum::<f64>() / p, budget))
}

/// `P(X_{1:n} > t) = Π_i F̄_i(t)`, in log scale.
fn ln_all_alive(sys: &SystemSpec, t: i64) -> f64 {
    sys.active().iter().map(|c| c.ln_sf(t)).sum()
}

/// The system whose actives are replaced by their residual lifetimes at
/// age `t`; the cold standby does not age.
pub fn system_at_age(sys: &SystemSpec, t: i64) -> Result<SystemSpec> {
    if t < 0 {
        return Ok(sys.clone());
    }
    let ln_p = ln_all_alive(sys, t);
    if ln_p == f64::NEG_INFINITY {
        return Err(Error::ConditioningOnNullEvent(0.0));
    }
    let active = sys
        .active()
        .iter()
        .map(|c| c.residual_transform(t))
        .collect::<Result<Vec<DiscreteLifetime>>>()?;
    sys.with_active(active)
}

/// `P(T - t > s | X_{1:n} > t)`, the reliability of the aged system.
pub fn syslevel_residual_sf(sys: &SystemSpec, t: i64, s: i64) -> Result<f64> {
    let aged = system_at_age(sys, t)?;
    Ok(crate::lifetime::reliability_T(&aged, s))
}

/// `E(T - t | X_{1:n} > t)`, the expected lifetime of the aged system.
pub fn syslevel_mrl(sys: &SystemSpec, t: i64, d: f64) -> Result<(f64, AccuracyBudget)> {
    let aged = system_at_age(sys, t)?;
    expected_T(&aged, d)
}

/// `P(T - t > s | X_{n-k+1:n} > t)`.
pub fn working_residual_sf(sys: &SystemSpec, t: i64, s: i64) -> Result<f64> {
    let t = t.max(0);
    let kernel = Kernel::new(sys, t + s.max(0));
    let p = conditioning(kernel.os_sf(t))?;
    if s < 0 {
        return Ok(1.0);
    }
    Ok(((kernel.h_row_sum(t + s, t + 1) + kernel.os_sf(t + s)) / p).min(1.0))
}

/// `E(T - t | X_{n-k+1:n} > t) ≈ (1/P) Σ_{s=t}^{t0} [Σ_{u=t+1}^{s} h(s,u) + P(X_{n-k+1:n} > s)]`.
pub fn working_mrl(sys: &SystemSpec, t: i64, d: f64) -> Result<(f64, AccuracyBudget)> {
    check_d(d)?;
    let t = t.max(0);
    let p = conditioning(Kernel::new(sys, t).os_sf(t))?;
    let budget = conditional_truncation(sys, t, p, d);
    let kernel = Kernel::new(sys, budget.t0);
    let rows: Vec<f64> = (t..=budget.t0)
        .into_par_iter()
        .map(|s| kernel.h_row_sum(s, t + 1) + kernel.os_sf(s))
        .collect();
    Ok((rows.iter().sum::<f64>() / p, budget))
}

/// Probability of the conditioning event of `kind` at time `t`.
fn conditioning_probability(sys: &SystemSpec, kind: CurveKind, t: i64) -> f64 {
    match kind {
        CurveKind::Reliability => 1.0,
        CurveKind::UsualMrl => Kernel::new(sys, t.max(0)).reliability(t),
        CurveKind::SystemLevelMrl => ln_all_alive(sys, t).exp(),
        CurveKind::WorkingMrl => Kernel::new(sys, t.max(0)).os_sf(t),
    }
}

/// One curve point per `t`; points whose conditioning probability is
/// below [`GAP_THRESHOLD`] (or whose evaluation fails) are gaps.
pub fn mrl_curve(sys: &SystemSpec, kind: CurveKind, ts: &[i64], d: f64) -> Result<Curve> {
    check_d(d)?;
    let points = ts
        .par_iter()
        .map(|&t| {
            let gap = CurvePoint { t, value: None, certified_error: None };
            if conditioning_probability(sys, kind, t) < GAP_THRESHOLD {
                return gap;
            }
            let r = match kind {
                CurveKind::Reliability => Ok((crate::lifetime::reliability_T(sys, t), 0.0)),
                CurveKind::UsualMrl => usual_mrl(sys, t, d).map(|(v, b)| (v, b.certified_error)),
                CurveKind::SystemLevelMrl => syslevel_mrl(sys, t, d).map(|(v, b)| (v, b.certified_error)),
                CurveKind::WorkingMrl => working_mrl(sys, t, d).map(|(v, b)| (v, b.certified_error)),
            };
            match r {
                Ok((v, e)) => CurvePoint { t, value: Some(v), certified_error: Some(e) },
                Err(_) => gap,
            }
        })
        .collect();
    Ok(Curve { kind, points })
}
