#![allow(dead_code)]

use kspare::{DiscreteLifetime, SystemSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Weights on `{0, ..., len-1}`, with occasional holes.
pub fn finite_law(rng: &mut ChaCha8Rng, max_len: usize) -> DiscreteLifetime {
    let len = rng.random_range(1..=max_len);
    loop {
        let w: Vec<f64> =
            (0..len).map(|_| if rng.random_bool(0.15) { 0.0 } else { rng.random::<f64>() }).collect();
        if w.iter().sum::<f64>() > 1e-3 {
            return DiscreteLifetime::finite_pmf(&w).unwrap();
        }
    }
}

/// A heterogeneous system with `n ≤ 4` and supports of at most 5 points.
pub fn finite_system(rng: &mut ChaCha8Rng) -> SystemSpec {
    let n = rng.random_range(1..=4);
    let k = rng.random_range(1..=n);
    let active = (0..n).map(|_| finite_law(rng, 5)).collect();
    SystemSpec::new(k, active, finite_law(rng, 5)).unwrap()
}

/// Coefficient of `x^v y^m` in `Π_j (a_j x + b_j y + c_j)` by running over
/// every assignment of components to the three categories.
pub fn naive_category_sum(w: &[(f64, f64, f64)], v: usize, m: usize) -> f64 {
    let n = w.len();
    let mut total = 0.0;
    let mut code = vec![0u8; n];
    loop {
        let below = code.iter().filter(|&&c| c == 0).count();
        let exact = code.iter().filter(|&&c| c == 1).count();
        if below == v && exact == m {
            total += code
                .iter()
                .zip(w)
                .map(|(&c, &(a, b, cc))| match c {
                    0 => a,
                    1 => b,
                    _ => cc,
                })
                .product::<f64>();
        }
        let mut j = 0;
        while j < n {
            code[j] += 1;
            if code[j] < 3 {
                break;
            }
            code[j] = 0;
            j += 1;
        }
        if j == n {
            return total;
        }
    }
}

pub fn random_triples(rng: &mut ChaCha8Rng, n: usize) -> Vec<(f64, f64, f64)> {
    (0..n).map(|_| (rng.random(), rng.random(), rng.random())).collect()
}

pub fn geo(p: f64) -> DiscreteLifetime {
    DiscreteLifetime::geometric(p).unwrap()
}

pub fn nb(r: u32, p: f64) -> DiscreteLifetime {
    DiscreteLifetime::neg_binomial(r, p).unwrap()
}

pub fn dw(q: f64, beta: f64) -> DiscreteLifetime {
    DiscreteLifetime::discrete_weibull(q, beta).unwrap()
}

pub fn pmf(w: &[f64]) -> DiscreteLifetime {
    DiscreteLifetime::finite_pmf(w).unwrap()
}
