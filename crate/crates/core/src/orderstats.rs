//! Order statistics of independent, possibly heterogeneous, discrete
//! lifetimes.
//!
//! The ordered-permutation sums over `P_{v,s}` that appear in the
//! reliability formulas are evaluated as polynomial coefficients: the sum
//! over all ways of assigning `A` components to a "below" category, `B` to
//! an "exactly" category and the rest to an "above" category equals the
//! coefficient of `x^A y^B` in `Π_j (a_j x + b_j y + c_j)`.

use crate::distributions::DiscreteLifetime;
use crate::error::{Error, Result};
use crate::lifetime::{AccuracyBudget, Envelope, TruncationRule};
use crate::special::binomial_prefix_sum;
use serde::{Deserialize, Serialize};

/// Per-component factor triples `(a_j, b_j, c_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryWeights {
    below: Vec<f64>,
    exact: Vec<f64>,
    above: Vec<f64>,
}

impl CategoryWeights {
    pub fn new(triples: &[(f64, f64, f64)]) -> Result<Self> {
        for (j, &(a, b, c)) in triples.iter().enumerate() {
            for x in [a, b, c] {
                if !(0.0..=1.0).contains(&x) {
                    return Err(Error::InvalidParameter(format!("weight {x} of component {j} outside [0,1]")));
                }
            }
        }
        Ok(Self {
            below: triples.iter().map(|t| t.0).collect(),
            exact: triples.iter().map(|t| t.1).collect(),
            above: triples.iter().map(|t| t.2).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.below.len()
    }

    pub fn is_empty(&self) -> bool {
        self.below.is_empty()
    }

    pub fn triple(&self, j: usize) -> (f64, f64, f64) {
        (self.below[j], self.exact[j], self.above[j])
    }
}

/// Coefficient of `x^count_a y^count_b` in `Π_j (a_j x + b_j y + c_j)`.
pub fn category_sum(weights: &CategoryWeights, count_a: usize, count_b: usize) -> Result<f64> {
    let n = weights.len();
    if count_a + count_b > n {
        return Err(Error::InvalidCounts { below: count_a, exact: count_b, n });
    }
    let w = count_b + 1;
    let mut table = vec![0.0; (count_a + 1) * w];
    table[0] = 1.0;
    for j in 0..n {
        let (a, b, c) = weights.triple(j);
        for i in (0..=count_a.min(j + 1)).rev() {
            for m in (0..=count_b.min(j + 1 - i.min(j + 1))).rev() {
                let mut v = table[i * w + m] * c;
                if i > 0 {
                    v += table[(i - 1) * w + m] * a;
                }
                if m > 0 {
                    v += table[i * w + m - 1] * b;
                }
                table[i * w + m] = v;
            }
        }
    }
    Ok(table[count_a * w + count_b])
}

/// Coefficients of `x^v y^(total - v)`, `v = 0..total` (at least one
/// component in the "exactly" category), from one pass.
fn category_sums_on_diagonal(below: &[f64], exact: &[f64], above: &[f64], total: usize, out: &mut Vec<f64>) {
    // table[i][m], i + m ≤ total, flattened with row width total + 1.
    let w = total + 1;
    let mut table = vec![0.0; w * w];
    table[0] = 1.0;
    for j in 0..below.len() {
        let (a, b, c) = (below[j], exact[j], above[j]);
        let reach = total.min(j + 1);
        for i in (0..=reach).rev() {
            for m in (0..=(reach - i)).rev() {
                let mut v = table[i * w + m] * c;
                if i > 0 {
                    v += table[(i - 1) * w + m] * a;
                }
                if m > 0 {
                    v += table[i * w + m - 1] * b;
                }
                table[i * w + m] = v;
            }
        }
    }
    out.clear();
    out.extend((0..total).map(|v| table[v * w + total - v]));
}

/// A k-out-of-n system of independent active components with one cold
/// standby unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "crate::spec_file::RawSpec", into = "crate::spec_file::RawSpec")]
pub struct SystemSpec {
    k: usize,
    active: Vec<DiscreteLifetime>,
    standby: DiscreteLifetime,
}

impl SystemSpec {
    pub fn new(k: usize, active: Vec<DiscreteLifetime>, standby: DiscreteLifetime) -> Result<Self> {
        let n = active.len();
        if n == 0 {
            return Err(Error::InvalidParameter("a system needs at least one active component".into()));
        }
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!("k must satisfy 1 ≤ k ≤ n = {n}, got {k}")));
        }
        Ok(Self { k, active, standby })
    }

    pub fn iid(n: usize, k: usize, component: DiscreteLifetime, standby: DiscreteLifetime) -> Result<Self> {
        Self::new(k, vec![component; n], standby)
    }

    pub fn n(&self) -> usize {
        self.active.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn active(&self) -> &[DiscreteLifetime] {
        &self.active
    }

    pub fn standby(&self) -> &DiscreteLifetime {
        &self.standby
    }

    pub fn is_iid(&self) -> bool {
        self.active.iter().all(|a| a == &self.active[0])
    }

    /// Same shape and standby, new active components.
    pub fn with_active(&self, active: Vec<DiscreteLifetime>) -> Result<Self> {
        if active.len() != self.n() {
            return Err(Error::DimensionMismatch(self.n(), self.k, active.len(), self.k));
        }
        Self::new(self.k, active, self.standby.clone())
    }

    /// Largest time at which any lifetime can still be positive, if all
    /// supports are bounded.
    pub fn support_max(&self) -> Option<i64> {
        let mut m = self.standby.support_max()?;
        for a in &self.active {
            m = m.max(a.support_max()?);
        }
        Some(m)
    }
}

/// Cached component weights for evaluating `h_{k,n}(t, u)` and
/// `P(X_{n-k+1:n} > t)` on `0 ≤ u ≤ t ≤ t_max`.
///
/// Rows are indexed by time and hold one entry per component, so a sweep
/// over `t` reuses the "below"/"exact" rows of every `u` and the "above"
/// row of each `t`.
#[derive(Debug, Clone)]
pub struct Kernel {
    n: usize,
    k: usize,
    t_max: i64,
    /// below[u][j] = F_j(u - 1)
    below: Vec<Vec<f64>>,
    /// exact[u][j] = p_j(u)
    exact: Vec<Vec<f64>>,
    /// above[t][j] = F̄_j(t)
    above: Vec<Vec<f64>>,
    /// cdf[t][j] = F_j(t)
    cdf: Vec<Vec<f64>>,
    /// standby[s] = Ḡ(s)
    standby: Vec<f64>,
}

impl Kernel {
    pub fn new(sys: &SystemSpec, t_max: i64) -> Self {
        let len = (t_max.max(0) + 1) as usize;
        let rows = |f: &dyn Fn(&DiscreteLifetime, i64) -> f64| -> Vec<Vec<f64>> {
            (0..len as i64).map(|t| sys.active.iter().map(|d| f(d, t)).collect()).collect()
        };
        Self {
            n: sys.n(),
            k: sys.k,
            t_max: t_max.max(0),
            below: rows(&|d, u| d.cdf_before(u)),
            exact: rows(&|d, u| d.pmf(u)),
            above: rows(&|d, t| d.sf(t)),
            cdf: rows(&|d, t| d.cdf(t)),
            standby: (0..len as i64).map(|s| sys.standby.sf(s)).collect(),
        }
    }

    pub fn t_max(&self) -> i64 {
        self.t_max
    }

    fn check(&self, t: i64) {
        assert!(t <= self.t_max, "kernel built up to {} but queried at {t}", self.t_max);
    }

    /// `h_{k,n}(t, u) = P(X_{n-k+1:n} = u, X_{n-k+2:n} > t, Z > t - u)`.
    pub fn h(&self, t: i64, u: i64) -> f64 {
        let mut scratch = Vec::new();
        self.h_with(t, u, &mut scratch)
    }

    fn h_with(&self, t: i64, u: i64, scratch: &mut Vec<f64>) -> f64 {
        self.check(t);
        let g = self.standby[(t - u) as usize];
        if g == 0.0 {
            return 0.0;
        }
        let total = self.n - self.k + 1;
        category_sums_on_diagonal(
            &self.below[u as usize],
            &self.exact[u as usize],
            &self.above[t as usize],
            total,
            scratch,
        );
        g * scratch.iter().sum::<f64>()
    }

    /// `Σ_{u=from}^{t} h_{k,n}(t, u)`.
    pub fn h_row_sum(&self, t: i64, from: i64) -> f64 {
        let mut scratch = Vec::new();
        (from.max(0)..=t).map(|u| self.h_with(t, u, &mut scratch)).sum()
    }

    /// `P(X_{n-k+1:n} > t)`.
    pub fn os_sf(&self, t: i64) -> f64 {
        if t < 0 {
            return 1.0;
        }
        self.check(t);
        failure_count_tail(&self.cdf[t as usize], &self.above[t as usize], self.n - self.k)
    }

    /// `P(T > t)`.
    pub fn reliability(&self, t: i64) -> f64 {
        if t < 0 {
            return 1.0;
        }
        (self.h_row_sum(t, 0) + self.os_sf(t)).min(1.0)
    }
}

/// Probability that at most `max_failed` of the independent events with
/// probabilities `q` occur (Poisson-binomial failure count). `s` holds the
/// complements, taken from the survivals rather than `1 - q` so that
/// certain survival stays exactly 0.
fn failure_count_tail(q: &[f64], s: &[f64], max_failed: usize) -> f64 {
    let mut dist = vec![0.0; max_failed + 1];
    dist[0] = 1.0;
    for (j, (&qj, &sj)) in q.iter().zip(s).enumerate() {
        for m in (0..=max_failed.min(j + 1)).rev() {
            let stay = dist[m] * sj;
            let moved = if m > 0 { dist[m - 1] * qj } else { 0.0 };
            dist[m] = stay + moved;
        }
    }
    dist.iter().sum::<f64>().clamp(0.0, 1.0)
}

/// Full distribution of the number of components failed by time `t`.
pub fn failure_count_distribution(components: &[DiscreteLifetime], t: i64) -> Vec<f64> {
    let n = components.len();
    let mut dist = vec![0.0; n + 1];
    dist[0] = 1.0;
    for (j, c) in components.iter().enumerate() {
        let (q, sf) = (c.cdf(t), c.sf(t));
        for m in (0..=j + 1).rev() {
            let stay = dist[m] * sf;
            let moved = if m > 0 { dist[m - 1] * q } else { 0.0 };
            dist[m] = stay + moved;
        }
    }
    dist
}

/// `h_{k,n}(t, u)` for a single pair.
pub fn h_kn(sys: &SystemSpec, t: i64, u: i64) -> Result<f64> {
    if u < 0 || u > t {
        return Err(Error::InvalidArgs(format!("h_kn needs 0 ≤ u ≤ t, got t={t}, u={u}")));
    }
    let g = sys.standby.sf(t - u);
    if g == 0.0 {
        return Ok(0.0);
    }
    let below: Vec<f64> = sys.active.iter().map(|d| d.cdf_before(u)).collect();
    let exact: Vec<f64> = sys.active.iter().map(|d| d.pmf(u)).collect();
    let above: Vec<f64> = sys.active.iter().map(|d| d.sf(t)).collect();
    let mut out = Vec::new();
    category_sums_on_diagonal(&below, &exact, &above, sys.n() - sys.k + 1, &mut out);
    Ok(g * out.iter().sum::<f64>())
}

/// `P(X_{n-k+1:n} > t)`: at most `n - k` components have failed by `t`.
pub fn os_sf(components: &[DiscreteLifetime], k: usize, t: i64) -> f64 {
    let n = components.len();
    assert!(k >= 1 && k <= n, "os_sf needs 1 ≤ k ≤ n");
    if t < 0 {
        return 1.0;
    }
    let q: Vec<f64> = components.iter().map(|d| d.cdf(t)).collect();
    let s: Vec<f64> = components.iter().map(|d| d.sf(t)).collect();
    failure_count_tail(&q, &s, n - k)
}

/// `E X_{n-k+1:n}` truncated so the discarded tail is at most `d`, using
/// `P(X_{n-k+1:n} > t) ≤ Σ_{v=0}^{n-k} C(n,v) max_i F̄_i(t)`.
pub fn os_mean(components: &[DiscreteLifetime], k: usize, d: f64) -> Result<(f64, AccuracyBudget)> {
    let n = components.len();
    if !(d > 0.0) {
        return Err(Error::InvalidParameter(format!("error budget must be positive, got {d}")));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("k must satisfy 1 ≤ k ≤ n = {n}, got {k}")));
    }
    let env = Envelope::new(components);
    let factor = binomial_prefix_sum(n as u64, (n - k) as u64);
    let mut t0 = env.inverse(d / factor);
    while factor * env.bound(t0) > d {
        t0 += 1;
    }
    let value: f64 = (0..=t0).map(|t| os_sf(components, k, t)).sum();
    let budget = AccuracyBudget {
        d,
        t0,
        rule: TruncationRule::OrderStatistic,
        envelope: env.kind(),
        certified_error: factor * env.bound(t0),
    };
    Ok((value, budget))
}
