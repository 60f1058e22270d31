mod common;

use std::sync::Arc;

use common::{family, random_polytope, rng, uniform_vec};
use proptest::prelude::*;
use rand::Rng;
use tvprox::linalg::{dist, dot, norm, sub, DenseMatrix};
use tvprox::problem::{contraction_factor, NetworkUtility, SmoothFunction};
use tvprox::{NonsmoothCost, Problem, SmoothCost, Stage};

/// `A = R diag(s)` padded with a zero row, `R` a plane rotation: singular
/// values are `s`, so `L = max s²` and `μ = min s²`.
fn rotated_least_squares(s: [f64; 3], theta: f64, target: Vec<f64>) -> SmoothCost {
    let (c, si) = (theta.cos(), theta.sin());
    let rows = vec![
        vec![c * s[0], -si * s[1], 0.0],
        vec![si * s[0], c * s[1], 0.0],
        vec![0.0, 0.0, s[2]],
        vec![0.0, 0.0, 0.0],
    ];
    let l = s.iter().fold(0.0f64, |m, v| m.max(v * v));
    let mu = s.iter().fold(f64::INFINITY, |m, v| m.min(v * v));
    SmoothCost::least_squares(Arc::new(DenseMatrix::from_rows(&rows).unwrap()), target, l, mu).unwrap()
}

fn network(kappa: Vec<f64>) -> SmoothCost {
    SmoothCost::network_utility(NetworkUtility {
        links: 3,
        source_rows: Arc::new(vec![vec![1.0, 1.0, 0.0], vec![0.0, 1.0, 1.0]]),
        kappa,
        nu: 0.5,
    })
    .unwrap()
}

fn smooth_costs(seed: u64) -> Vec<SmoothCost> {
    let mut r = rng(seed);
    let weights = uniform_vec(&mut r, 6, 0.1, 3.0);
    let center = uniform_vec(&mut r, 6, -1.0, 1.0);
    let mut ls_target = uniform_vec(&mut r, 4, -1.0, 1.0);
    ls_target[3] = 0.3;
    vec![
        SmoothCost::diagonal_quadratic(weights, center).unwrap(),
        rotated_least_squares([1.0, 0.4, 0.0], r.random_range(0.0..3.0), ls_target),
        network(vec![1.2, 0.7]),
    ]
}

/// Points where the network utility's curvature constants apply (rates ≥ 0).
fn sample_point<R: Rng>(r: &mut R, n: usize) -> Vec<f64> {
    uniform_vec(r, n, 0.0, 2.0)
}

fn central_difference<F: SmoothFunction<f64>>(f: &F, x: &[f64], h: f64) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            (f.value(&p).unwrap() - f.value(&m).unwrap()) / (2.0 * h)
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn declared_curvature_constants_hold_on_samples(seed in 0u64..10_000) {
        let mut r = rng(seed ^ 0x55);
        for g in smooth_costs(seed) {
            let n = g.dimension();
            prop_assert!(0.0 <= g.strong_convexity() && g.strong_convexity() <= g.lipschitz());
            for _ in 0..20 {
                let x = sample_point(&mut r, n);
                let y = sample_point(&mut r, n);
                let dg = sub(&g.gradient(&x).unwrap(), &g.gradient(&y).unwrap());
                let dx = sub(&x, &y);
                prop_assert!(norm(&dg) <= g.lipschitz() * norm(&dx) * (1.0 + 1e-12) + 1e-14);
                prop_assert!(dot(&dg, &dx) >= g.strong_convexity() * dot(&dx, &dx) * (1.0 - 1e-12) - 1e-14);
            }
        }
    }

    #[test]
    fn gradients_match_central_differences(seed in 0u64..10_000) {
        let mut r = rng(seed);
        for g in smooth_costs(seed) {
            let x = sample_point(&mut r, g.dimension());
            let grad = g.gradient(&x).unwrap();
            let fd = central_difference(&g, &x, 1e-6);
            prop_assert!(dist(&grad, &fd) <= 1e-5 * (1.0 + norm(&grad)));
        }
    }

    #[test]
    fn nonsmooth_costs_are_convex_on_finite_triples(which in 0usize..5, seed in 0u64..1000,
                                                    theta in 0.0f64..1.0) {
        let h = family(which, 4, seed);
        let mut r = rng(seed);
        let x = uniform_vec(&mut r, 4, -1.5, 1.5);
        let y = uniform_vec(&mut r, 4, -1.5, 1.5);
        let (hx, hy) = (h.value(&x), h.value(&y));
        if hx.is_finite() && hy.is_finite() {
            let z: Vec<f64> = x.iter().zip(&y).map(|(a, b)| theta * a + (1.0 - theta) * b).collect();
            prop_assert!(h.value(&z) <= theta * hx + (1.0 - theta) * hy + 1e-12);
        }
        if let Some(set) = h.set() {
            prop_assert_eq!(hx.is_finite(), set.contains(&x));
        }
    }

    #[test]
    fn objective_is_finite_exactly_on_the_feasible_set(seed in 0u64..1000) {
        let mut r = rng(seed);
        let set = random_polytope(&mut r, 3, 3);
        let stage = Stage {
            smooth: SmoothCost::centered(vec![0.1, 0.2, 0.3]).unwrap(),
            nonsmooth: NonsmoothCost::indicator(set.clone()),
        };
        let p = Problem::stationary(stage, 2).unwrap();
        for _ in 0..20 {
            let x = uniform_vec(&mut r, 3, -1.5, 1.5);
            prop_assert_eq!(p.eval_objective(1, &x).unwrap().is_finite(), set.contains(&x));
        }
    }

    #[test]
    fn contraction_is_monotone_in_strong_convexity(l in 0.1f64..10.0, frac in 0.0f64..1.0,
                                                   a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let alpha = frac.max(1e-3) / l;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let r_lo = contraction_factor(alpha, lo * l, l).unwrap().rho;
        let r_hi = contraction_factor(alpha, hi * l, l).unwrap().rho;
        prop_assert!(r_hi <= r_lo + 1e-15);
    }
}

#[test]
fn sampled_pairs_respect_the_declared_diameter() {
    let mut r = rng(77);
    for _ in 0..10 {
        let set = random_polytope(&mut r, 4, 5);
        let pts: Vec<_> = (0..100).map(|_| set.sample(&mut r).unwrap()).collect();
        for (i, a) in pts.iter().enumerate() {
            assert!(set.contains(a));
            for b in &pts[i + 1..] {
                assert!(dist(a, b) <= set.diameter());
            }
        }
    }
}

#[test]
fn network_utility_domain_is_enforced() {
    let g = network(vec![1.0, 1.0]);
    assert!(g.value(&[-0.9, -0.9, 0.0, 0.0, 0.0, 0.0]).is_err());
    assert!(g.gradient(&[0.1; 6]).is_ok());
}
