//! Ground truth from the definition `T = min(X_{n-k+1:n} + Z, X_{n-k+2:n})`:
//! exhaustive enumeration over the joint support and a seedable Monte
//! Carlo simulator.

use crate::distributions::DiscreteLifetime;
use crate::error::{Error, Result};
use crate::orderstats::SystemSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

/// Enumeration refuses joint supports larger than this.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;
/// Unbounded laws are cut where the survival drops below this.
const TRUNCATION_SF: f64 = 1e-16;
/// Rejection sampling gives up below this acceptance rate.
const MIN_ACCEPTANCE: f64 = 1e-6;
/// Draws per chunk; chunks are the unit of parallel work.
const CHUNK: u64 = 1 << 14;

/// A quantity of the system lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Query {
    /// `E T`
    ExpectedT,
    /// `P(T > t)`
    Reliability(i64),
    /// `P(T - t > s | T > t)`
    UsualSf { t: i64, s: i64 },
    /// `E(T - t | T > t)`
    UsualMrl(i64),
    /// `P(T - t > s | X_{1:n} > t)`
    SystemSf { t: i64, s: i64 },
    /// `E(T - t | X_{1:n} > t)`
    SystemMrl(i64),
    /// `P(T - t > s | X_{n-k+1:n} > t)`
    WorkingSf { t: i64, s: i64 },
    /// `E(T - t | X_{n-k+1:n} > t)`
    WorkingMrl(i64),
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::ExpectedT => write!(f, "et"),
            Query::Reliability(t) => write!(f, "reliability:{t}"),
            Query::UsualSf { t, s } => write!(f, "usual-sf:{t}:{s}"),
            Query::UsualMrl(t) => write!(f, "usual-mrl:{t}"),
            Query::SystemSf { t, s } => write!(f, "system-sf:{t}:{s}"),
            Query::SystemMrl(t) => write!(f, "system-mrl:{t}"),
            Query::WorkingSf { t, s } => write!(f, "working-sf:{t}:{s}"),
            Query::WorkingMrl(t) => write!(f, "working-mrl:{t}"),
        }
    }
}

impl FromStr for Query {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::InvalidArgs(format!("unrecognized query '{s}'"));
        let int = |i: usize| -> Result<i64> { parts.get(i).and_then(|p| p.parse().ok()).ok_or_else(bad) };
        let arity = |m: usize| if parts.len() == m { Ok(()) } else { Err(bad()) };
        Ok(match parts[0] {
            "et" => {
                arity(1)?;
                Query::ExpectedT
            }
            "reliability" => {
                arity(2)?;
                Query::Reliability(int(1)?)
            }
            "usual-sf" => {
                arity(3)?;
                Query::UsualSf { t: int(1)?, s: int(2)? }
            }
            "usual-mrl" => {
                arity(2)?;
                Query::UsualMrl(int(1)?)
            }
            "system-sf" => {
                arity(3)?;
                Query::SystemSf { t: int(1)?, s: int(2)? }
            }
            "system-mrl" => {
                arity(2)?;
                Query::SystemMrl(int(1)?)
            }
            "working-sf" => {
                arity(3)?;
                Query::WorkingSf { t: int(1)?, s: int(2)? }
            }
            "working-mrl" => {
                arity(2)?;
                Query::WorkingMrl(int(1)?)
            }
            _ => return Err(bad()),
        })
    }
}

/// One realization: sorted active lifetimes and the standby lifetime.
struct Outcome<'a> {
    sorted: &'a [i64],
    z: i64,
    k: usize,
}

impl Outcome<'_> {
    fn lifetime(&self) -> i64 {
        let n = self.sorted.len();
        let first = self.sorted[n - self.k] + self.z;
        if self.k >= 2 {
            first.min(self.sorted[n - self.k + 1])
        } else {
            first
        }
    }

    /// `(conditioning event holds, value)` for the query.
    fn observe(&self, q: Query) -> (bool, f64) {
        let tt = self.lifetime();
        let n = self.sorted.len();
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        match q {
            Query::ExpectedT => (true, tt as f64),
            Query::Reliability(t) => (true, ind(tt > t)),
            Query::UsualSf { t, s } => (tt > t, ind(tt > t + s)),
            Query::UsualMrl(t) => (tt > t, (tt - t) as f64),
            Query::SystemSf { t, s } => (self.sorted[0] > t, ind(tt > t + s)),
            Query::SystemMrl(t) => (self.sorted[0] > t, (tt - t) as f64),
            Query::WorkingSf { t, s } => (self.sorted[n - self.k] > t, ind(tt > t + s)),
            Query::WorkingMrl(t) => (self.sorted[n - self.k] > t, (tt - t) as f64),
        }
    }
}

/// Atoms `(value, mass)`; unbounded laws are cut at the first `N` with
/// `sf(N) < 1e-16` and the mass above `N - 1` sits on `N`.
fn atoms(d: &DiscreteLifetime) -> Vec<(i64, f64)> {
    let top = match d.support_max() {
        Some(n) => n.max(0),
        None => d.inverse_sf(TRUNCATION_SF).max(0),
    };
    let mut out: Vec<(i64, f64)> = (0..top).map(|t| (t, d.pmf(t))).filter(|a| a.1 > 0.0).collect();
    let last = d.sf(top - 1);
    if last > 0.0 {
        out.push((top, last));
    }
    out
}

/// Exact value of `query` by full joint enumeration.
pub fn enumerate_exact(sys: &SystemSpec, query: Query) -> Result<f64> {
    let active: Vec<Vec<(i64, f64)>> = sys.active().iter().map(atoms).collect();
    let standby = atoms(sys.standby());
    let size = active
        .iter()
        .map(|a| a.len() as u128)
        .chain(std::iter::once(standby.len() as u128))
        .try_fold(1u128, |acc, m| acc.checked_mul(m))
        .unwrap_or(u128::MAX);
    if size > ENUMERATION_LIMIT {
        return Err(Error::TooLarge(size, ENUMERATION_LIMIT));
    }
    let n = active.len();
    let mut idx = vec![0usize; n];
    let mut xs = vec![0i64; n];
    let mut num = 0.0;
    let mut den = 0.0;
    'outer: loop {
        let mut w = 1.0;
        for j in 0..n {
            let (v, p) = active[j][idx[j]];
            xs[j] = v;
            w *= p;
        }
        xs.sort_unstable();
        for &(z, pz) in &standby {
            let o = Outcome { sorted: &xs, z, k: sys.k() };
            let (cond, value) = o.observe(query);
            if cond {
                den += w * pz;
                num += w * pz * value;
            }
        }
        for j in 0..n {
            idx[j] += 1;
            if idx[j] < active[j].len() {
                continue 'outer;
            }
            idx[j] = 0;
        }
        break;
    }
    if den <= 0.0 {
        return Err(Error::ConditioningOnNullEvent(den));
    }
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: u64,
    pub seed: u64,
}

/// Inverse-survival sampler: `X = min{t : sf(t) ≤ U}` has `P(X > t) = sf(t)`.
struct Sampler {
    dist: DiscreteLifetime,
    /// sf[t] for t in 0..len, decreasing.
    table: Vec<f64>,
}

const TABLE_LIMIT: usize = 1 << 20;

impl Sampler {
    fn new(dist: &DiscreteLifetime) -> Self {
        let mut table = Vec::new();
        let mut t = 0;
        loop {
            let s = dist.sf(t);
            table.push(s);
            if s < 1e-13 || table.len() >= TABLE_LIMIT {
                break;
            }
            t += 1;
        }
        Self { dist: dist.clone(), table }
    }

    fn draw(&self, u: f64) -> i64 {
        let i = self.table.partition_point(|&s| s > u);
        if i < self.table.len() {
            i as i64
        } else {
            self.dist.inverse_sf(u)
        }
    }
}

/// Monte Carlo estimate of `query` from `n_samples` accepted draws.
///
/// Component `j` (standby `0`, actives `1..=n`) reads its uniforms from its
/// own ChaCha stream, so the draws do not depend on chunking or thread
/// count and a fixed seed reproduces the estimate bit for bit.
pub fn simulate(sys: &SystemSpec, query: Query, n_samples: u64, seed: u64) -> Result<SimResult> {
    if n_samples == 0 {
        return Err(Error::InvalidArgs("n_samples must be at least 1".into()));
    }
    let samplers: Vec<Sampler> =
        std::iter::once(sys.standby()).chain(sys.active().iter()).map(Sampler::new).collect();
    let k = sys.k();
    let n = sys.n();
    let max_draws = (n_samples as f64 / MIN_ACCEPTANCE).min(u64::MAX as f64 / 2.0) as u64;
    let run_chunk = |c: u64| -> Vec<f64> {
        let mut rngs: Vec<ChaCha8Rng> = (0..=n as u64)
            .map(|j| {
                let mut r = ChaCha8Rng::seed_from_u64(seed);
                r.set_stream(j);
                // One u64 (two 32-bit words) per draw.
                r.set_word_pos(c as u128 * CHUNK as u128 * 2);
                r
            })
            .collect();
        let mut xs = vec![0i64; n];
        let mut out = Vec::new();
        for _ in 0..CHUNK {
            let z = samplers[0].draw(1.0 - rngs[0].random::<f64>());
            for j in 0..n {
                xs[j] = samplers[j + 1].draw(1.0 - rngs[j + 1].random::<f64>());
            }
            xs.sort_unstable();
            let (cond, value) = Outcome { sorted: &xs, z, k }.observe(query);
            if cond {
                out.push(value);
            }
        }
        out
    };

    let batch = rayon::current_num_threads().max(1) as u64 * 4;
    let mut values: Vec<f64> = Vec::with_capacity(n_samples.min(1 << 26) as usize);
    let mut chunk = 0u64;
    let mut drawn = 0u64;
    while (values.len() as u64) < n_samples {
        let remaining = n_samples - values.len() as u64;
        let want = remaining.div_ceil(CHUNK).clamp(1, batch);
        let results: Vec<Vec<f64>> = (chunk..chunk + want).into_par_iter().map(run_chunk).collect();
        chunk += want;
        drawn += want * CHUNK;
        for r in results {
            let take = (n_samples - values.len() as u64).min(r.len() as u64) as usize;
            values.extend_from_slice(&r[..take]);
        }
        let accepted = values.len() as u64;
        let too_rare = drawn >= 10_000_000 && (accepted as f64) < MIN_ACCEPTANCE * drawn as f64;
        if accepted < n_samples && (too_rare || drawn >= max_draws) {
            return Err(Error::ConditioningTooRare { accepted, drawn });
        }
    }
    let m = values.len() as f64;
    let mean = values.iter().sum::<f64>() / m;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (m - 1.0)
    } else {
        0.0
    };
    Ok(SimResult { estimate: mean, std_error: (var / m).sqrt(), n_samples, seed })
}
