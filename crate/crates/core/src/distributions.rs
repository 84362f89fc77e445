//! Discrete lifetime distributions on `{0, 1, 2, ...}`.
//!
//! Every family exposes its survival function `sf(t) = P(X > t)`, the
//! mass function, and a certified bound `b(t0) ≥ Σ_{t>t0} sf(t)` on the
//! tail of the survival sum. The tail bounds are what make truncated
//! infinite sums of reliability quantities certifiable.
//!
//! Conventions: `sf(t) = 1` for `t < 0`; the left limit `F(u⁻)` of an
//! integer-valued lifetime is `cdf(u - 1)`.

use crate::error::{Error, Result};
use crate::special::{self, upper_inc_gamma, upper_inc_gamma_inverse};
use serde::{Deserialize, Serialize};

/// Factors below this are multiplied in log space.
const UNDERFLOW_GUARD: f64 = 1e-300;

/// Weight vectors summing to less than this are rejected.
const MIN_PMF_MASS: f64 = 1e-12;

/// Geometric law `P(X = t) = p (1 - p)^t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Geometric {
    p: f64,
}

impl Geometric {
    pub fn new(p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!("geometric p must lie in (0,1), got {p}")));
        }
        Ok(Self { p })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn ln_sf(&self, t: i64) -> f64 {
        (t + 1) as f64 * (-self.p).ln_1p()
    }

    fn tail_bound(&self, t0: i64) -> f64 {
        ((t0 + 2) as f64 * (-self.p).ln_1p()).exp() / self.p
    }
}

/// Negative binomial law counting failures before the `r`-th success,
/// `P(X = t) = C(r + t - 1, t) (1 - p)^t p^r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegBinomial {
    r: u32,
    p: f64,
}

impl NegBinomial {
    pub fn new(r: u32, p: f64) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidParameter("negative binomial r must be ≥ 1".into()));
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "negative binomial p must lie in (0,1), got {p}"
            )));
        }
        Ok(Self { r, p })
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn pmf(&self, t: i64) -> f64 {
        if t < 0 {
            return 0.0;
        }
        let r = self.r as i64;
        // C(r + t - 1, t) = C(r + t - 1, r - 1); r is small.
        let ln_c = ln_binomial(r + t - 1, r - 1);
        (ln_c + t as f64 * (-self.p).ln_1p() + r as f64 * self.p.ln()).exp()
    }

    /// Regularized incomplete beta route `I_{1-p}(t + 1, r)`.
    pub fn sf_via_beta(&self, t: i64) -> f64 {
        if t < 0 {
            return 1.0;
        }
        special::beta_reg((t + 1) as f64, self.r as f64, 1.0 - self.p)
    }

    /// Certified bound `(r/p) F̄_{r,p}(t0 + 1)`.
    fn tail_bound(&self, t0: i64) -> f64 {
        self.r as f64 / self.p * nb_survival(self.r, self.p, t0 + 1)
    }
}

/// Discrete Weibull law with `sf(t) = q^((t + 1)^β)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteWeibull {
    q: f64,
    beta: f64,
}

impl DiscreteWeibull {
    pub fn new(q: f64, beta: f64) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "discrete Weibull q must lie in (0,1), got {q}"
            )));
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "discrete Weibull beta must be positive, got {beta}"
            )));
        }
        Ok(Self { q, beta })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn ln_sf(&self, t: i64) -> f64 {
        if t < 0 {
            return 0.0;
        }
        ((t + 1) as f64).powf(self.beta) * self.q.ln()
    }

    fn pmf(&self, t: i64) -> f64 {
        if t < 0 {
            return 0.0;
        }
        let ln_q = self.q.ln();
        let lo = (t as f64).powf(self.beta);
        let hi = ((t + 1) as f64).powf(self.beta);
        // sf(t-1) (1 - q^(hi - lo))
        (lo * ln_q).exp() * -((hi - lo) * ln_q).exp_m1()
    }

    /// `q^(t0+2) / (1-q)` for `β ≥ 1`; the incomplete-gamma bound for `β < 1`.
    fn tail_bound(&self, t0: i64) -> f64 {
        let q = self.q;
        if self.beta >= 1.0 {
            return ((t0 + 2) as f64 * q.ln()).exp() / (1.0 - q);
        }
        let a = 1.0 / self.beta + 1.0;
        let l = -q.ln();
        let s0 = ((t0 + 2) as f64).powf(self.beta).floor();
        let g = upper_inc_gamma(a, (s0 + 1.0) * l).unwrap_or(0.0);
        (1.0 - q) / (q * q) * (-a * l.ln()).exp() * g
    }

    /// Closed-form starting point for the tail-bound inverse.
    fn tail_bound_guess(&self, budget: f64) -> i64 {
        let q = self.q;
        let raw = if self.beta >= 1.0 {
            ((1.0 - q) * budget).ln() / q.ln() - 2.0
        } else {
            let a = 1.0 / self.beta + 1.0;
            let l = -q.ln();
            let y = budget * q * q * l.powf(a) / (1.0 - q);
            match upper_inc_gamma_inverse(a, y) {
                Ok(x) => (x / l).powf(1.0 / self.beta) - 2.0,
                Err(_) => 0.0,
            }
        };
        clamp_index(raw.ceil())
    }
}

/// Finite-support law given by a normalized mass vector on `{0, ..., N}`.
#[derive(Debug, Clone, PartialEq)]
pub struct FinitePmf {
    pmf: Vec<f64>,
    /// `sf[t] = Σ_{s>t} pmf[s]`.
    sf: Vec<f64>,
    /// `tail[t] = Σ_{s>t} sf[s]`.
    tail: Vec<f64>,
}

impl FinitePmf {
    /// Normalizes arbitrary nonnegative weights.
    pub fn new(weights: &[f64]) -> Result<Self> {
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::InvalidParameter("pmf weights must be finite and nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if !(total >= MIN_PMF_MASS) {
            return Err(Error::InvalidParameter(format!("pmf weights sum to {total}")));
        }
        let mut pmf: Vec<f64> = weights.iter().map(|w| w / total).collect();
        while pmf.len() > 1 && *pmf.last().unwrap() == 0.0 {
            pmf.pop();
        }
        let n = pmf.len();
        let mut sf = vec![0.0; n];
        let mut acc = 0.0;
        for t in (0..n).rev() {
            sf[t] = acc;
            acc += pmf[t];
        }
        // Before the first atom the survival is exactly one.
        for t in 0..n {
            if pmf[t] > 0.0 {
                break;
            }
            sf[t] = 1.0;
        }
        let mut tail = vec![0.0; n];
        let mut acc = 0.0;
        for t in (0..n).rev() {
            tail[t] = acc;
            acc += sf[t];
        }
        Ok(Self { pmf, sf, tail })
    }

    pub fn pmf_values(&self) -> &[f64] {
        &self.pmf
    }

    /// Largest value with positive mass.
    pub fn max_value(&self) -> i64 {
        self.pmf.len() as i64 - 1
    }

    fn sf(&self, t: i64) -> f64 {
        if t < 0 {
            1.0
        } else {
            self.sf.get(t as usize).copied().unwrap_or(0.0)
        }
    }

    fn cdf(&self, t: i64) -> f64 {
        if t < 0 {
            return 0.0;
        }
        let upto = (t as usize + 1).min(self.pmf.len());
        if upto == self.pmf.len() {
            return 1.0;
        }
        self.pmf[..upto].iter().sum::<f64>().min(1.0)
    }

    fn tail_sum(&self, t0: i64) -> f64 {
        if t0 < 0 {
            return self.tail[0] + self.sf[0] + (-1 - t0) as f64;
        }
        self.tail.get(t0 as usize).copied().unwrap_or(0.0)
    }

    fn mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(t, p)| t as f64 * p).sum()
    }
}

/// Residual lifetime `[X - age | X > age]`: `sf(s) = sf_X(s + age) / sf_X(age)`
/// for `s ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    base: Box<DiscreteLifetime>,
    age: i64,
    ln_sf_age: f64,
}

impl Residual {
    pub fn base(&self) -> &DiscreteLifetime {
        &self.base
    }

    pub fn age(&self) -> i64 {
        self.age
    }
}

/// A discrete lifetime on the nonnegative integers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Encoded", into = "Encoded")]
pub enum DiscreteLifetime {
    Geometric(Geometric),
    NegBinomial(NegBinomial),
    DiscreteWeibull(DiscreteWeibull),
    FinitePmf(FinitePmf),
    Residual(Residual),
}

/// Tag identifying the parametric family of a [`DiscreteLifetime`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Geometric,
    NegBinomial,
    DiscreteWeibull,
    FinitePmf,
    Residual,
}

impl DiscreteLifetime {
    pub fn geometric(p: f64) -> Result<Self> {
        Geometric::new(p).map(Self::Geometric)
    }

    pub fn neg_binomial(r: u32, p: f64) -> Result<Self> {
        NegBinomial::new(r, p).map(Self::NegBinomial)
    }

    pub fn discrete_weibull(q: f64, beta: f64) -> Result<Self> {
        DiscreteWeibull::new(q, beta).map(Self::DiscreteWeibull)
    }

    pub fn finite_pmf(weights: &[f64]) -> Result<Self> {
        FinitePmf::new(weights).map(Self::FinitePmf)
    }

    pub fn family(&self) -> Family {
        match self {
            Self::Geometric(_) => Family::Geometric,
            Self::NegBinomial(_) => Family::NegBinomial,
            Self::DiscreteWeibull(_) => Family::DiscreteWeibull,
            Self::FinitePmf(_) => Family::FinitePmf,
            Self::Residual(_) => Family::Residual,
        }
    }

    /// `P(X > t)`.
    pub fn sf(&self, t: i64) -> f64 {
        if t < 0 {
            return 1.0;
        }
        match self {
            Self::Geometric(g) => g.ln_sf(t).exp(),
            Self::NegBinomial(nb) => nb_survival(nb.r, nb.p, t),
            Self::DiscreteWeibull(w) => w.ln_sf(t).exp(),
            Self::FinitePmf(f) => f.sf(t),
            Self::Residual(res) => (res.base.ln_sf(t + res.age) - res.ln_sf_age).exp().min(1.0),
        }
    }

    /// `ln P(X > t)`, finite wherever the survival is positive even if it
    /// underflows in linear scale.
    pub fn ln_sf(&self, t: i64) -> f64 {
        if t < 0 {
            return 0.0;
        }
        match self {
            Self::Geometric(g) => g.ln_sf(t),
            Self::NegBinomial(nb) => nb_ln_survival(nb.r, nb.p, t),
            Self::DiscreteWeibull(w) => w.ln_sf(t),
            Self::FinitePmf(f) => f.sf(t).ln(),
            Self::Residual(res) => (res.base.ln_sf(t + res.age) - res.ln_sf_age).min(0.0),
        }
    }

    /// `P(X ≤ t)`.
    pub fn cdf(&self, t: i64) -> f64 {
        if t < 0 {
            return 0.0;
        }
        match self {
            Self::Geometric(g) => -g.ln_sf(t).exp_m1(),
            Self::DiscreteWeibull(w) => -w.ln_sf(t).exp_m1(),
            Self::FinitePmf(f) => f.cdf(t),
            Self::Residual(res) => -(res.base.ln_sf(t + res.age) - res.ln_sf_age).min(0.0).exp_m1(),
            Self::NegBinomial(_) => 1.0 - self.sf(t),
        }
    }

    /// `F(u⁻) = P(X < u)`.
    pub fn cdf_before(&self, u: i64) -> f64 {
        self.cdf(u - 1)
    }

    /// `P(X = t)`.
    pub fn pmf(&self, t: i64) -> f64 {
        if t < 0 {
            return 0.0;
        }
        match self {
            Self::Geometric(g) => g.p * g.ln_sf(t - 1).exp(),
            Self::NegBinomial(nb) => nb.pmf(t),
            Self::DiscreteWeibull(w) => w.pmf(t),
            Self::FinitePmf(f) => f.pmf.get(t as usize).copied().unwrap_or(0.0),
            Self::Residual(_) => (self.sf(t - 1) - self.sf(t)).max(0.0),
        }
    }

    /// Largest value carrying mass, `None` for unbounded support.
    pub fn support_max(&self) -> Option<i64> {
        match self {
            Self::FinitePmf(f) => Some(f.max_value()),
            Self::Residual(res) => res.base.support_max().map(|n| n - res.age),
            _ => None,
        }
    }

    /// Closed-form mean where one exists.
    pub fn mean(&self) -> Option<f64> {
        match self {
            Self::Geometric(g) => Some((1.0 - g.p) / g.p),
            Self::NegBinomial(nb) => Some(nb.r as f64 * (1.0 - nb.p) / nb.p),
            Self::FinitePmf(f) => Some(f.mean()),
            Self::DiscreteWeibull(w) if w.beta == 1.0 => Some(w.q / (1.0 - w.q)),
            _ => None,
        }
    }

    /// Mean with an absolute error at most `eps`: the closed form when
    /// available, otherwise `Σ_{t=0}^{t0} sf(t)` with `b(t0) ≤ eps`.
    /// Returns `(value, certified_error)`.
    pub fn mean_certified(&self, eps: f64) -> (f64, f64) {
        if let Some(m) = self.mean() {
            return (m, 0.0);
        }
        let t0 = self.tail_bound_inverse(eps);
        let head: f64 = (0..=t0).map(|t| self.sf(t)).sum();
        (head, self.tail_bound(t0))
    }

    /// Certified upper bound on `Σ_{t > t0} sf(t)`, non-increasing in `t0`.
    /// Defined for `t0 ≥ -1`.
    pub fn tail_bound(&self, t0: i64) -> f64 {
        let t0 = t0.max(-1);
        match self {
            Self::Geometric(g) => g.tail_bound(t0),
            Self::NegBinomial(nb) => nb.tail_bound(t0),
            Self::DiscreteWeibull(w) => w.tail_bound(t0),
            Self::FinitePmf(f) => f.tail_sum(t0),
            Self::Residual(res) => {
                if let Some(n) = self.support_max() {
                    if t0 >= n {
                        return 0.0;
                    }
                }
                let b = res.base.tail_bound(t0 + res.age);
                (b.ln() - res.ln_sf_age).exp()
            }
        }
    }

    /// Smallest `t0 ≥ 0` with `tail_bound(t0) ≤ budget`.
    pub fn tail_bound_inverse(&self, budget: f64) -> i64 {
        let guess = match self {
            Self::Geometric(g) => clamp_index(((budget * g.p).ln() / (-g.p).ln_1p() - 2.0).ceil()),
            Self::NegBinomial(nb) if budget > 0.0 => {
                let m = nb_sf_complement_inverse(nb.r, 1.0 - nb.p, (nb.p * budget / nb.r as f64).min(1.0));
                (m - 1).max(0)
            }
            Self::DiscreteWeibull(w) if budget > 0.0 => w.tail_bound_guess(budget),
            Self::FinitePmf(f) => f.max_value(),
            _ => 0,
        };
        refine_monotone_index(guess, |t0| self.tail_bound(t0) <= budget)
    }

    /// Smallest `t ≥ 0` with `sf(t) ≤ v`; the inverse-survival sampler.
    pub fn inverse_sf(&self, v: f64) -> i64 {
        if v >= 1.0 {
            return 0;
        }
        let guess = match self {
            Self::Geometric(g) => clamp_index((v.ln() / (-g.p).ln_1p() - 1.0).ceil()),
            Self::DiscreteWeibull(w) => clamp_index(((v.ln() / w.q.ln()).powf(1.0 / w.beta) - 1.0).ceil()),
            _ => 0,
        };
        refine_monotone_index(guess, |t| self.sf(t) <= v)
    }

    /// Distribution of `[X - t | X > t]`.
    pub fn residual_transform(&self, t: i64) -> Result<DiscreteLifetime> {
        let ln_sf_age = self.ln_sf(t);
        if !(ln_sf_age > f64::NEG_INFINITY) {
            return Err(Error::ConditioningOnNullEvent(0.0));
        }
        Ok(match self {
            Self::Residual(inner) => {
                let age = inner.age + t;
                Self::Residual(Residual {
                    ln_sf_age: inner.base.ln_sf(age),
                    base: inner.base.clone(),
                    age,
                })
            }
            other => Self::Residual(Residual { base: Box::new(other.clone()), age: t, ln_sf_age }),
        })
    }
}

/// Exactly evaluated survival of the negative binomial law,
/// `F̄_{r,p}(t) = Σ_{s=0}^{r-1} C(r+t, s) p^s (1-p)^{r+t-s}`.
pub fn nb_survival(r: u32, p: f64, t: i64) -> f64 {
    if t < 0 {
        return 1.0;
    }
    let r = r as i64;
    let ln_q = (-p).ln_1p();
    // Smallest power factor is (1-p)^(t+1).
    if ((t + 1) as f64 * ln_q).exp() > UNDERFLOW_GUARD {
        let mut sum = 0.0;
        let mut c = 1.0;
        for s in 0..r {
            if s > 0 {
                c = c * (r + t - s + 1) as f64 / s as f64;
            }
            sum += c * p.powi(s as i32) * ((r + t - s) as f64 * ln_q).exp();
        }
        sum.min(1.0)
    } else {
        nb_ln_survival(r as u32, p, t).exp()
    }
}

/// `ln F̄_{r,p}(t)` by log-sum-exp over the finite-sum terms.
pub fn nb_ln_survival(r: u32, p: f64, t: i64) -> f64 {
    if t < 0 {
        return 0.0;
    }
    let r = r as i64;
    let ln_p = p.ln();
    let ln_q = (-p).ln_1p();
    let logs: Vec<f64> = (0..r)
        .map(|s| ln_binomial(r + t, s) + s as f64 * ln_p + (r + t - s) as f64 * ln_q)
        .collect();
    let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    (m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln()).min(0.0)
}

/// Smallest integer `m ≥ -1` with `F̄_{r,1-p}(m) ≤ target`, where
/// `F̄_{r,1-p}` is the negative binomial survival with success
/// probability `1 - p`.
///
/// Exponential bracketing followed by bisection over the exactly
/// evaluated finite sum.
pub fn nb_sf_complement_inverse(r: u32, p: f64, target: f64) -> i64 {
    let sf = |m: i64| nb_survival(r, 1.0 - p, m);
    if target >= 1.0 {
        return -1;
    }
    let holds = |m: i64| sf(m) <= target;
    if holds(-1) {
        return -1;
    }
    let mut lo = -1i64; // fails
    let mut hi = 0i64;
    while !holds(hi) {
        lo = hi;
        hi = if hi == 0 { 1 } else { hi.saturating_mul(2) };
        if hi == i64::MAX {
            return hi;
        }
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

fn ln_binomial(n: i64, k: i64) -> f64 {
    if k < 0 || k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (1..=k).map(|j| ((n - k + j) as f64 / j as f64).ln()).sum()
}

fn clamp_index(x: f64) -> i64 {
    if x.is_nan() || x < 0.0 {
        0
    } else if x > 1e15 {
        1_000_000_000_000_000
    } else {
        x as i64
    }
}

/// Given a monotone predicate on `t ≥ 0` (false then true), returns the
/// first `t` where it holds, starting the search from `guess`.
pub(crate) fn refine_monotone_index(guess: i64, holds: impl Fn(i64) -> bool) -> i64 {
    let mut guess = guess.max(0);
    if holds(guess) {
        // Walk down by galloping, then bisect.
        let mut hi = guess;
        let mut step = 1i64;
        let mut lo;
        loop {
            if hi == 0 {
                return 0;
            }
            let cand = (hi - step).max(0);
            if holds(cand) {
                hi = cand;
                step = step.saturating_mul(2);
                if cand == 0 {
                    return 0;
                }
            } else {
                lo = cand;
                break;
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if holds(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    } else {
        let mut lo = guess;
        let mut step = 1i64;
        loop {
            let cand = lo.saturating_add(step);
            if holds(cand) {
                guess = cand;
                break;
            }
            lo = cand;
            step = step.saturating_mul(2);
            if cand == i64::MAX {
                return cand;
            }
        }
        let mut hi = guess;
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if holds(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    }
}

/// JSON wire form.
#[derive(Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
enum Encoded {
    Geometric { p: f64 },
    #[serde(rename = "negbinomial")]
    NegBinomial { r: u32, p: f64 },
    #[serde(rename = "dweibull")]
    DiscreteWeibull { q: f64, beta: f64 },
    #[serde(rename = "pmf")]
    FinitePmf { weights: Vec<f64> },
    Residual { base: Box<DiscreteLifetime>, age: i64 },
}

impl TryFrom<Encoded> for DiscreteLifetime {
    type Error = Error;

    fn try_from(e: Encoded) -> Result<Self> {
        match e {
            Encoded::Geometric { p } => Self::geometric(p),
            Encoded::NegBinomial { r, p } => Self::neg_binomial(r, p),
            Encoded::DiscreteWeibull { q, beta } => Self::discrete_weibull(q, beta),
            Encoded::FinitePmf { weights } => Self::finite_pmf(&weights),
            Encoded::Residual { base, age } => base.residual_transform(age),
        }
    }
}

impl From<DiscreteLifetime> for Encoded {
    fn from(d: DiscreteLifetime) -> Self {
        match d {
            DiscreteLifetime::Geometric(g) => Encoded::Geometric { p: g.p },
            DiscreteLifetime::NegBinomial(nb) => Encoded::NegBinomial { r: nb.r, p: nb.p },
            DiscreteLifetime::DiscreteWeibull(w) => Encoded::DiscreteWeibull { q: w.q, beta: w.beta },
            DiscreteLifetime::FinitePmf(f) => Encoded::FinitePmf { weights: f.pmf },
            DiscreteLifetime::Residual(r) => Encoded::Residual { base: r.base, age: r.age },
        }
    }
}
