mod common;

use common::*;
use kspare::orderstats::{
    category_sum, failure_count_distribution, h_kn, os_mean, os_sf, CategoryWeights, Kernel,
};
use kspare::special::binomial;
use kspare::{DiscreteLifetime, Error, SystemSpec};
use rand::Rng;

#[test]
fn category_sum_examples() {
    let w = CategoryWeights::new(&[(0.2, 0.3, 0.5)]).unwrap();
    assert!((category_sum(&w, 0, 1).unwrap() - 0.3).abs() < 1e-15);
    let w = CategoryWeights::new(&[(0.2, 0.3, 0.5); 3]).unwrap();
    assert!((category_sum(&w, 1, 1).unwrap() - 0.18).abs() < 1e-15);
    assert!(matches!(category_sum(&w, 2, 2), Err(Error::InvalidCounts { .. })));
    assert!(CategoryWeights::new(&[(0.2, 1.3, 0.5)]).is_err());
}

#[test]
fn category_sum_matches_enumeration_n4() {
    let mut r = rng(4);
    for _ in 0..50 {
        let w = random_triples(&mut r, 4);
        let cw = CategoryWeights::new(&w).unwrap();
        for v in 0..=4 {
            for m in 0..=4 - v {
                let dp = category_sum(&cw, v, m).unwrap();
                assert!((dp - naive_category_sum(&w, v, m)).abs() < 1e-14);
            }
        }
    }
}

#[test]
fn iid_category_sum_is_multinomial() {
    let (a, b, c) = (0.15, 0.35, 0.4);
    let cw = CategoryWeights::new(&[(a, b, c); 6]).unwrap();
    for v in 0..=6usize {
        for m in 0..=6 - v {
            let coef = binomial(6, v as u64) * binomial(6 - v as u64, m as u64);
            let want = coef * a.powi(v as i32) * b.powi(m as i32) * c.powi((6 - v - m) as i32);
            assert!((category_sum(&cw, v, m).unwrap() - want).abs() < 1e-14);
        }
    }
}

#[test]
fn h_examples() {
    let sys = SystemSpec::iid(1, 1, geo(0.5), geo(0.5)).unwrap();
    assert!((h_kn(&sys, 1, 0).unwrap() - 0.125).abs() < 1e-15);

    let sys = SystemSpec::iid(2, 2, geo(0.5), geo(0.5)).unwrap();
    assert!((h_kn(&sys, 0, 0).unwrap() - 0.25).abs() < 1e-15);
    assert!(matches!(h_kn(&sys, 0, 1), Err(Error::InvalidArgs(_))));
    assert!(matches!(h_kn(&sys, 3, -1), Err(Error::InvalidArgs(_))));

    // Standby dead after one cycle: Ḡ(t - u) = 0 once t - u ≥ 1.
    let sys = SystemSpec::iid(3, 2, geo(0.3), pmf(&[0.4, 0.6])).unwrap();
    assert_eq!(h_kn(&sys, 5, 2).unwrap(), 0.0);
    assert!(h_kn(&sys, 5, 5).unwrap() > 0.0);
}

#[test]
fn kernel_agrees_with_direct_h() {
    let mut r = rng(11);
    for _ in 0..20 {
        let sys = finite_system(&mut r);
        let kernel = Kernel::new(&sys, 8);
        for t in 0..=8 {
            for u in 0..=t {
                assert!((kernel.h(t, u) - h_kn(&sys, t, u).unwrap()).abs() < 1e-15);
            }
        }
    }
}

#[test]
fn h_mass_reconstructs_failure_counts() {
    // Σ_u h(t,u)/Ḡ(t-u) = P(X_{n-k+1:n} ≤ t < X_{n-k+2:n}): exactly n-k+1
    // failures by t, or for k = 1 at least one more than n-1.
    let active = vec![geo(0.3), nb(2, 0.4), dw(0.7, 1.5), pmf(&[0.1, 0.2, 0.3, 0.4])];
    let z = geo(0.2);
    for k in 1..=4 {
        let sys = SystemSpec::new(k, active.clone(), z.clone()).unwrap();
        for t in 0..=30 {
            let window: f64 = (0..=t).map(|u| h_kn(&sys, t, u).unwrap() / z.sf(t - u)).sum();
            let fc = failure_count_distribution(&active, t);
            assert!((fc.iter().sum::<f64>() - 1.0).abs() < 1e-13);
            assert!(window <= 1.0 + 1e-13);
            let want = if k >= 2 { fc[4 - k + 1] } else { 1.0 - os_sf(&active, 1, t) };
            assert!((window - want).abs() < 1e-13, "k={k} t={t}");
        }
    }
}

#[test]
fn os_sf_examples() {
    let two = vec![geo(0.5), geo(0.5)];
    assert!((os_sf(&two, 1, 0) - 0.75).abs() < 1e-15);
    assert_eq!(os_sf(&two, 1, -1), 1.0);
    let (ex, b) = os_mean(&vec![geo(0.25); 3], 2, 1e-4).unwrap();
    assert!((ex - 2.3977).abs() < 1e-4);
    assert!(b.certified_error <= 1e-4);
    let (ex, _) = os_mean(&vec![nb(2, 0.25); 5], 3, 1e-4).unwrap();
    assert!((ex - 5.1947).abs() < 1e-4);
    let (ex, _) = os_mean(&vec![dw(0.75, 2.0); 10], 3, 1e-4).unwrap();
    assert!((ex - 1.6935).abs() < 1e-4);
}

/// `P(X_{n-k+1:n} > t)` by enumerating the joint support.
fn os_sf_enumerated(laws: &[DiscreteLifetime], k: usize, t: i64) -> f64 {
    let n = laws.len();
    let atoms: Vec<Vec<(i64, f64)>> = laws
        .iter()
        .map(|d| (0..=d.support_max().unwrap()).map(|x| (x, d.pmf(x))).collect())
        .collect();
    let mut idx = vec![0usize; n];
    let mut total = 0.0;
    loop {
        let mut xs: Vec<i64> = (0..n).map(|j| atoms[j][idx[j]].0).collect();
        let w: f64 = (0..n).map(|j| atoms[j][idx[j]].1).product();
        xs.sort_unstable();
        if xs[n - k] > t {
            total += w;
        }
        let mut j = 0;
        while j < n {
            idx[j] += 1;
            if idx[j] < atoms[j].len() {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
        if j == n {
            return total;
        }
    }
}

#[test]
fn os_sf_matches_enumeration_on_five_components() {
    let mut r = rng(5);
    for _ in 0..20 {
        let laws: Vec<DiscreteLifetime> = (0..5).map(|_| finite_law(&mut r, 5)).collect();
        for k in 1..=5 {
            for t in -1..=5 {
                assert!((os_sf(&laws, k, t) - os_sf_enumerated(&laws, k, t)).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn order_statistics_are_ordered() {
    let mut r = rng(6);
    for _ in 0..30 {
        let n = r.random_range(1..=6);
        let laws: Vec<DiscreteLifetime> = (0..n).map(|_| finite_law(&mut r, 7)).collect();
        for t in 0..=7 {
            // order index n-k+1 grows as k shrinks
            for k in 2..=n {
                assert!(os_sf(&laws, k, t) <= os_sf(&laws, k - 1, t) + 1e-15);
            }
        }
    }
}

#[test]
fn iid_os_sf_is_binomial_sum() {
    for &(n, k) in &[(3usize, 2usize), (5, 3), (10, 3), (7, 7), (6, 1)] {
        let x = nb(3, 0.3);
        let laws = vec![x.clone(); n];
        for t in 0..40 {
            let f = x.cdf(t);
            let want: f64 = (0..=n - k)
                .map(|v| binomial(n as u64, v as u64) * f.powi(v as i32) * (1.0 - f).powi((n - v) as i32))
                .sum();
            assert!((os_sf(&laws, k, t) - want).abs() < 1e-13);
        }
    }
}
