//! Reliability, mass function and certified expected lifetime of a
//! k-out-of-n system with one cold standby unit,
//! `T = min(X_{n-k+1:n} + Z, X_{n-k+2:n})` with `X_{n+1:n} = ∞`.

#![allow(non_snake_case)]

use crate::distributions::{DiscreteLifetime, Family};
use crate::error::{Error, Result};
use crate::orderstats::{Kernel, SystemSpec};
use crate::special::{binomial, binomial_prefix_sum};
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;

/// Which truncation condition picked `t0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TruncationRule {
    /// `Σ_{t>t0} max_i F̄_i(t) ≤ (d / Σ_{v=0}^{n-k+1} C(n,v))^{1/(k-1)}`.
    Independent,
    /// The same condition with identically distributed actives.
    Iid,
    /// `k = 1`: `Σ_{t>t0} max_i F̄_i(t) ≤ d / (2^n - 1)`.
    Parallel,
    /// All-geometric actives, exact `E X_{n-k+1:n}` plus a truncated
    /// standby contribution.
    GeometricClosedForm,
    /// `k = 1` residual means: both halves of the split tail condition.
    ParallelSplit,
    /// Truncated mean of a single order statistic.
    OrderStatistic,
}

/// How `Σ_{t>t0} max_i F̄_i(t)` was bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeKind {
    /// Geometric law with the smallest `p`.
    Geometric,
    /// Negative binomial with the largest `r` and smallest `p`.
    NegBinomial,
    /// Discrete Weibull with the largest `q` and smallest `β ≥ 1`.
    DiscreteWeibull,
    /// Discrete Weibull with smallest `β < 1` (incomplete-gamma bound).
    DiscreteWeibullHeavy,
    /// Exact envelope of bounded supports.
    Finite,
    /// `Σ_i b_i(t0)` over per-component bounds.
    ComponentSum,
}

/// Requested accuracy together with the truncation that achieves it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccuracyBudget {
    pub d: f64,
    pub t0: i64,
    pub rule: TruncationRule,
    pub envelope: EnvelopeKind,
    /// Bound on the discarded tail; never exceeds `d`.
    pub certified_error: f64,
}

impl fmt::Display for AccuracyBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", rule_name(self.rule), envelope_name(self.envelope))
    }
}

fn rule_name(r: TruncationRule) -> &'static str {
    match r {
        TruncationRule::Independent => "independent",
        TruncationRule::Iid => "iid",
        TruncationRule::Parallel => "parallel",
        TruncationRule::GeometricClosedForm => "geometric-closed-form",
        TruncationRule::ParallelSplit => "parallel-split",
        TruncationRule::OrderStatistic => "order-statistic",
    }
}

fn envelope_name(e: EnvelopeKind) -> &'static str {
    match e {
        EnvelopeKind::Geometric => "geometric",
        EnvelopeKind::NegBinomial => "negbinomial",
        EnvelopeKind::DiscreteWeibull => "dweibull",
        EnvelopeKind::DiscreteWeibullHeavy => "dweibull-heavy",
        EnvelopeKind::Finite => "finite",
        EnvelopeKind::ComponentSum => "component-sum",
    }
}

/// Certified bound `B(t0) ≥ Σ_{t>t0} max_i F̄_i(t)`.
///
/// Components of one parametric family are dominated by a single law of
/// that family; bounded supports get the exact envelope; anything else
/// falls back to summing the per-component bounds.
#[derive(Debug, Clone)]
pub struct Envelope {
    inner: Inner,
}

#[derive(Debug, Clone)]
enum Inner {
    Dominating(DiscreteLifetime, EnvelopeKind),
    /// tail[i] = Σ_{t ≥ i} max_j F̄_j(t)
    Finite(Vec<f64>),
    Sum(Vec<DiscreteLifetime>),
}

impl Envelope {
    pub fn new(components: &[DiscreteLifetime]) -> Self {
        Self { inner: Self::build(components) }
    }

    fn build(components: &[DiscreteLifetime]) -> Inner {
        let fam = components[0].family();
        let same = components.iter().all(|c| c.family() == fam);
        if same {
            match fam {
                Family::Geometric => {
                    let p = components
                        .iter()
                        .map(|c| match c {
                            DiscreteLifetime::Geometric(g) => g.p(),
                            _ => unreachable!(),
                        })
                        .fold(f64::INFINITY, f64::min);
                    return Inner::Dominating(DiscreteLifetime::geometric(p).unwrap(), EnvelopeKind::Geometric);
                }
                Family::NegBinomial => {
                    let (mut r, mut p) = (0u32, f64::INFINITY);
                    for c in components {
                        if let DiscreteLifetime::NegBinomial(nb) = c {
                            r = r.max(nb.r());
                            p = p.min(nb.p());
                        }
                    }
                    return Inner::Dominating(DiscreteLifetime::neg_binomial(r, p).unwrap(), EnvelopeKind::NegBinomial);
                }
                Family::DiscreteWeibull => {
                    let (mut q, mut beta) = (0.0f64, f64::INFINITY);
                    for c in components {
                        if let DiscreteLifetime::DiscreteWeibull(w) = c {
                            q = q.max(w.q());
                            beta = beta.min(w.beta());
                        }
                    }
                    let kind = if beta >= 1.0 {
                        EnvelopeKind::DiscreteWeibull
                    } else {
                        EnvelopeKind::DiscreteWeibullHeavy
                    };
                    return Inner::Dominating(DiscreteLifetime::discrete_weibull(q, beta).unwrap(), kind);
                }
                _ => {}
            }
        }
        if let Some(top) = components.iter().map(|c| c.support_max()).collect::<Option<Vec<_>>>() {
            let top = top.into_iter().max().unwrap_or(0).max(0);
            let mut tail = vec![0.0; top as usize + 2];
            for t in (0..=top).rev() {
                let m = components.iter().map(|c| c.sf(t)).fold(0.0, f64::max);
                tail[t as usize] = tail[t as usize + 1] + m;
            }
            return Inner::Finite(tail);
        }
        Inner::Sum(components.to_vec())
    }

    pub fn kind(&self) -> EnvelopeKind {
        match &self.inner {
            Inner::Dominating(_, k) => *k,
            Inner::Finite(_) => EnvelopeKind::Finite,
            Inner::Sum(_) => EnvelopeKind::ComponentSum,
        }
    }

    /// `B(t0)` for `t0 ≥ -1`.
    pub fn bound(&self, t0: i64) -> f64 {
        let t0 = t0.max(-1);
        match &self.inner {
            Inner::Dominating(d, _) => d.tail_bound(t0),
            Inner::Finite(tail) => tail.get((t0 + 1) as usize).copied().unwrap_or(0.0),
            Inner::Sum(cs) => cs.iter().map(|c| c.tail_bound(t0)).sum(),
        }
    }

    /// Smallest `t0 ≥ 0` with `B(t0) ≤ budget`.
    pub fn inverse(&self, budget: f64) -> i64 {
        match &self.inner {
            Inner::Dominating(d, _) => d.tail_bound_inverse(budget),
            Inner::Finite(tail) => (0..tail.len() as i64).find(|&t0| self.bound(t0) <= budget).unwrap_or(0),
            Inner::Sum(cs) => {
                let share = budget / cs.len() as f64;
                let guess = cs.iter().map(|c| c.tail_bound_inverse(share)).max().unwrap_or(0);
                crate::distributions::refine_monotone_index(guess, |t0| self.bound(t0) <= budget)
            }
        }
    }
}

fn check_d(d: f64) -> Result<()> {
    if d > 0.0 && d.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("error budget must be positive and finite, got {d}")))
    }
}

/// `P(T > t)`.
pub fn reliability_T(sys: &SystemSpec, t: i64) -> f64 {
    if t < 0 {
        return 1.0;
    }
    Kernel::new(sys, t).reliability(t)
}

/// `P(T > t)` for `t = 0..=t_max`.
pub fn reliability_curve(sys: &SystemSpec, t_max: i64) -> Vec<f64> {
    if t_max < 0 {
        return Vec::new();
    }
    let kernel = Kernel::new(sys, t_max);
    (0..=t_max).into_par_iter().map(|t| kernel.reliability(t)).collect()
}

/// `P(T = t) = P(T > t - 1) - P(T > t)`.
pub fn pmf_T(sys: &SystemSpec, t: i64) -> f64 {
    if t < 0 {
        return 0.0;
    }
    let kernel = Kernel::new(sys, t);
    let v = kernel.reliability(t - 1) - kernel.reliability(t);
    if v < 0.0 && v > -1e-13 {
        0.0
    } else {
        v
    }
}

/// Truncation index for `Σ_{t ≤ t0} P(T > t)` with tail at most `budget`,
/// from the component envelope only (no closed-form shortcuts).
pub(crate) fn generic_truncation(sys: &SystemSpec, budget: f64) -> AccuracyBudget {
    let n = sys.n();
    let k = sys.k();
    let env = Envelope::new(sys.active());
    if k == 1 {
        let factor = 2f64.powi(n as i32) - 1.0;
        let mut t0 = env.inverse(budget / factor);
        while factor * env.bound(t0) > budget {
            t0 += 1;
        }
        return AccuracyBudget {
            d: budget,
            t0,
            rule: TruncationRule::Parallel,
            envelope: env.kind(),
            certified_error: factor * env.bound(t0),
        };
    }
    let s = binomial_prefix_sum(n as u64, (n - k + 1) as u64);
    let power = (k - 1) as i32;
    let root = (budget / s).powf(1.0 / power as f64);
    let mut t0 = env.inverse(root);
    // The floating-point root may land a hair above the exact one.
    while s * env.bound(t0).powi(power) > budget {
        t0 += 1;
    }
    AccuracyBudget {
        d: budget,
        t0,
        rule: if sys.is_iid() { TruncationRule::Iid } else { TruncationRule::Independent },
        envelope: env.kind(),
        certified_error: s * env.bound(t0).powi(power),
    }
}

/// Bound on `Σ_{t>t0} P(T > t)` (for `k = 1`, on `Σ_{t>t0} P(X_{n:n} > t)`)
/// from the component envelope.
pub(crate) fn generic_tail(sys: &SystemSpec, t0: i64) -> f64 {
    let n = sys.n();
    let k = sys.k();
    let b = Envelope::new(sys.active()).bound(t0);
    if k == 1 {
        (2f64.powi(n as i32) - 1.0) * b
    } else {
        binomial_prefix_sum(n as u64, (n - k + 1) as u64) * b.powi((k - 1) as i32)
    }
}

/// Largest `n` for which the exact geometric order-statistic mean is
/// evaluated by subset expansion.
const SUBSET_LIMIT: usize = 20;

fn all_geometric(sys: &SystemSpec) -> Option<Vec<f64>> {
    sys.active()
        .iter()
        .map(|c| match c {
            DiscreteLifetime::Geometric(g) => Some(g.p()),
            _ => None,
        })
        .collect()
}

/// `C(n, k-1) ρ^{(t0+2)(k-1)} / (1 - ρ^{k-1})` with `ρ = 1 - min p`.
fn geometric_h_tail(n: usize, k: usize, p_min: f64, t0: i64) -> f64 {
    let m = (k - 1) as f64;
    let ln_rho = (-p_min).ln_1p();
    binomial(n as u64, (k - 1) as u64) * ((t0 + 2) as f64 * m * ln_rho).exp() / -(m * ln_rho).exp_m1()
}

fn geometric_truncation(n: usize, k: usize, ps: &[f64], d: f64) -> AccuracyBudget {
    let p_min = ps.iter().cloned().fold(f64::INFINITY, f64::min);
    let m = (k - 1) as f64;
    let ln_rho = (-p_min).ln_1p();
    let target = (d / binomial(n as u64, (k - 1) as u64) * -(m * ln_rho).exp_m1()).powf(1.0 / m);
    let raw = (target.ln() / ln_rho - 2.0).ceil();
    let guess = if raw.is_finite() && raw > 0.0 { raw.min(1e15) as i64 } else { 0 };
    let t0 = crate::distributions::refine_monotone_index(guess, |t0| geometric_h_tail(n, k, p_min, t0) <= d);
    AccuracyBudget {
        d,
        t0,
        rule: TruncationRule::GeometricClosedForm,
        envelope: EnvelopeKind::Geometric,
        certified_error: geometric_h_tail(n, k, p_min, t0),
    }
}

/// Exact `E X_{n-k+1:n}` for independent geometric lifetimes:
/// `Σ_{|W| ≥ k} (-1)^{|W|-k} C(|W|-1, k-1) ρ_W / (1 - ρ_W)` with
/// `ρ_W = Π_{i∈W} (1 - p_i)`.
pub fn geometric_order_mean(ps: &[f64], k: usize) -> f64 {
    let n = ps.len();
    assert!(n <= SUBSET_LIMIT && k >= 1 && k <= n);
    let ln_q: Vec<f64> = ps.iter().map(|p| (-p).ln_1p()).collect();
    let mut sum = 0.0;
    for mask in 1u32..(1u32 << n) {
        let size = mask.count_ones() as usize;
        if size < k {
            continue;
        }
        let ln_rho: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ln_q[i]).sum();
        let mean_min = ln_rho.exp() / -ln_rho.exp_m1();
        let sign = if (size - k) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binomial((size - 1) as u64, (k - 1) as u64) * mean_min;
    }
    sum
}

/// Share of the budget spent on the standby mean when it has no closed form.
const STANDBY_SHARE: f64 = 0.5;

/// Truncation index and rule for `E T` with error at most `d`.
pub fn choose_t0(sys: &SystemSpec, d: f64) -> Result<AccuracyBudget> {
    check_d(d)?;
    if sys.k() >= 2 && sys.n() <= SUBSET_LIMIT {
        if let Some(ps) = all_geometric(sys) {
            return Ok(geometric_truncation(sys.n(), sys.k(), &ps, d));
        }
    }
    if sys.k() == 1 && sys.standby().mean().is_none() {
        let mut b = generic_truncation(sys, d * (1.0 - STANDBY_SHARE));
        b.d = d;
        b.certified_error += sys.standby().mean_certified(d * STANDBY_SHARE).1;
        return Ok(b);
    }
    Ok(generic_truncation(sys, d))
}

/// Certified `E T`: the true value lies in `[value, value + d]`.
pub fn expected_T(sys: &SystemSpec, d: f64) -> Result<(f64, AccuracyBudget)> {
    let budget = choose_t0(sys, d)?;
    let t0 = budget.t0;
    let kernel = Kernel::new(sys, t0);
    let value = match budget.rule {
        TruncationRule::GeometricClosedForm => {
            let ps = all_geometric(sys).expect("geometric rule needs geometric actives");
            let rows: Vec<f64> = (0..=t0).into_par_iter().map(|t| kernel.h_row_sum(t, 0)).collect();
            rows.iter().sum::<f64>() + geometric_order_mean(&ps, sys.k())
        }
        TruncationRule::Parallel => {
            let share = if sys.standby().mean().is_some() { 0.0 } else { d * STANDBY_SHARE };
            let mean_z = if share > 0.0 { sys.standby().mean_certified(share).0 } else { sys.standby().mean().unwrap() };
            mean_z + (0..=t0).map(|t| kernel.os_sf(t)).sum::<f64>()
        }
        _ => {
            let rows: Vec<f64> = (0..=t0).into_par_iter().map(|t| kernel.reliability(t)).collect();
            rows.iter().sum()
        }
    };
    Ok((value, budget))
}

/// Whether a lifetime has a finite mean; all supported families do.
pub trait MeanFiniteness {
    fn has_finite_mean(&self) -> bool;
}

impl MeanFiniteness for DiscreteLifetime {
    fn has_finite_mean(&self) -> bool {
        true
    }
}

/// Sufficient condition for `E T < ∞`: the max-envelope of the actives
/// has a finite mean, and for `k = 1` so does the standby.
pub fn finiteness_check(sys: &SystemSpec) -> bool {
    finiteness_check_with(sys.k(), sys.active(), sys.standby())
}

pub fn finiteness_check_with<C: MeanFiniteness>(k: usize, active: &[C], standby: &C) -> bool {
    // Σ_t max_i F̄_i(t) ≤ Σ_i E X_i, so finiteness of each mean suffices.
    let envelope_finite = active.iter().all(|c| c.has_finite_mean());
    if k == 1 {
        envelope_finite && standby.has_finite_mean()
    } else {
        envelope_finite
    }
}
