mod common;

use common::{family, random_polytope, rng, uniform_vec};
use proptest::prelude::*;
use tvprox::linalg::{axpy, dist, lerp, norm, sub};
use tvprox::problem::{FeasibleSet, NonsmoothCost};
use tvprox::prox::{
    certify_precision, project_inexact, prox_budgeted, prox_exact, prox_perturbed, ProjectionMode,
};

fn vec_strategy(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, n)
}

/// Block soft-threshold over disjoint pairs.
fn group_oracle(y: &[f64], t: f64) -> Vec<f64> {
    let mut out = vec![0.0; y.len()];
    for (i, pair) in y.chunks(2).enumerate() {
        let nrm = norm(pair);
        if nrm > t {
            for (j, v) in pair.iter().enumerate() {
                out[2 * i + j] = v * (1.0 - t / nrm);
            }
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn prox_is_nonexpansive(which in 0usize..5, seed in 0u64..1000, lambda in 0.05f64..3.0,
                            y1 in vec_strategy(4), y2 in vec_strategy(4)) {
        let h = family(which, 4, seed);
        let p1 = prox_exact(&h, lambda, &y1).unwrap();
        let p2 = prox_exact(&h, lambda, &y2).unwrap();
        prop_assert!(dist(&p1, &p2) <= dist(&y1, &y2) + 1e-9);
    }

    #[test]
    fn perturbed_prox_respects_target_and_ordering(which in 0usize..5, seed in 0u64..1000,
                                                   lambda in 0.05f64..3.0, eps in 0.0f64..0.5,
                                                   y in vec_strategy(4)) {
        let h = family(which, 4, seed);
        let r = prox_perturbed(&h, lambda, &y, eps, &mut rng(seed)).unwrap();
        let p = prox_exact(&h, lambda, &y).unwrap();
        prop_assert!(dist(&r.point, &p) <= r.eps_target + 1e-8);
        prop_assert!(r.eps_certified <= r.eps_gap + 1e-8);
        if let Some(set) = h.set() {
            prop_assert!(set.contains(&r.point));
        }
    }

    #[test]
    fn interior_projection_satisfies_its_inequality(seed in 0u64..1000, eps in 0.0f64..0.5,
                                                    y in vec_strategy(3)) {
        let set = random_polytope(&mut rng(seed), 3, 2);
        let r = project_inexact(&set, &y, eps, ProjectionMode::InteriorInexact).unwrap();
        let p = set.project(&y).unwrap();
        prop_assert!(set.contains(&r.point));
        let lhs = dist(&r.point, &y).powi(2);
        let rhs = dist(&p, &y).powi(2) + eps * eps;
        prop_assert!(lhs <= rhs + 1e-9 * (1.0 + rhs));
        prop_assert!(r.eps_certified <= eps + 1e-8);
    }

    #[test]
    fn certificate_ordering_on_feasible_candidates(which in 0usize..5, seed in 0u64..1000,
                                                   lambda in 0.05f64..3.0, y in vec_strategy(4),
                                                   t in 0.0f64..1.0) {
        let h = family(which, 4, seed);
        // Feasible candidates: points on the segment from the prox to the anchor
        // (or to a random point when there is no set).
        let p = prox_exact(&h, lambda, &y).unwrap();
        let target = match h.set() {
            Some(s) => s.sample(&mut rng(seed)).unwrap(),
            None => uniform_vec(&mut rng(seed), 4, -2.0, 2.0),
        };
        let x = lerp(&p, &target, t);
        let c = certify_precision(&h, lambda, &y, &x).unwrap();
        prop_assert!(c.feasible);
        prop_assert!(c.consistent);
        prop_assert!(c.eps_certified <= c.eps_gap + 1e-8);
    }
}

#[test]
fn tiny_lambda_box_prox_is_the_projection() {
    let set = FeasibleSet::cube(3, 0.0, 1.0).unwrap();
    let h = NonsmoothCost::l1(5.0).unwrap().with_set(set.clone());
    let y = [1.7, -0.3, 0.4];
    let p = prox_exact(&h, 1e-8, &y).unwrap();
    assert!(dist(&p, &set.project(&y).unwrap()) < 1e-6);
}

#[test]
fn budgeted_polytope_precision_improves_with_budget() {
    let mut r = rng(17);
    let set = random_polytope(&mut r, 5, 6);
    let h = NonsmoothCost::indicator(set);
    for _ in 0..10 {
        let y = uniform_vec(&mut r, 5, -3.0, 3.0);
        let small = prox_budgeted(&h, 1.0, &y, 3).unwrap();
        let large = prox_budgeted(&h, 1.0, &y, 10_000).unwrap();
        assert!(small.eps_certified >= large.eps_certified - 1e-12);
        assert!(large.eps_certified <= 1e-8, "{}", large.eps_certified);
    }
}

#[test]
fn budgeted_group_prox_converges_to_block_shrinkage() {
    let mut r = rng(5);
    let groups = vec![vec![0, 1], vec![2, 3], vec![4, 5]];
    let h = NonsmoothCost::group(0.7, groups).unwrap();
    for _ in 0..20 {
        let y = uniform_vec(&mut r, 6, -2.0, 2.0);
        let res = prox_budgeted(&h, 0.9, &y, 10_000).unwrap();
        assert!(dist(&res.point, &group_oracle(&y, 0.63)) <= 1e-8);
        assert!(res.eps_certified <= 1e-8);
    }
}

#[test]
fn restricted_projection_certifies_distance_to_true_projection() {
    let mut r = rng(23);
    let set = random_polytope(&mut r, 4, 4);
    let margin = 0.05;
    let shrunk = set.shrink(margin).unwrap();
    for _ in 0..20 {
        let y = uniform_vec(&mut r, 4, -3.0, 3.0);
        let res = project_inexact(&set, &y, 0.0, ProjectionMode::RestrictedMargin { margin }).unwrap();
        let inner = shrunk.project(&y).unwrap();
        let outer = set.project(&y).unwrap();
        assert!(dist(&res.point, &inner) < 1e-8);
        assert!((res.eps_certified - dist(&inner, &outer)).abs() < 1e-8);
        assert!(set.contains(&res.point));
    }
}

#[test]
fn certificate_of_exact_and_shifted_points() {
    let set = FeasibleSet::cube(3, 0.0, 1.0).unwrap();
    let h = NonsmoothCost::<f64>::l1(0.1).unwrap().with_set(set);
    let y = [0.4, 1.3, -0.2];
    let p = prox_exact(&h, 0.5, &y).unwrap();
    let c = certify_precision(&h, 0.5, &y, &p).unwrap();
    assert!(c.eps_certified <= 1e-10);
    assert!(c.eps_gap <= 1e-5);

    // Feasible shift of length 0.05 toward the center of the box.
    let mut x = p.clone();
    let d = sub(&[0.5; 3], &p);
    axpy(0.05 / norm(&d), &d, &mut x);
    let c = certify_precision(&h, 0.5, &y, &x).unwrap();
    assert!((c.eps_certified - 0.05).abs() <= 1e-8);
    assert!(c.consistent);

    let c = certify_precision(&h, 0.5, &y, &[2.0, 0.0, 0.0]).unwrap();
    assert!(!c.feasible);
    assert!(c.eps_gap.is_infinite());
}

#[test]
fn random_feasible_candidates_are_consistent() {
    let mut r = rng(99);
    let set = random_polytope(&mut r, 3, 3);
    let h = NonsmoothCost::l1(0.25).unwrap().with_set(set.clone());
    for _ in 0..1000 {
        let y = uniform_vec(&mut r, 3, -2.0, 2.0);
        let x = set.sample(&mut r).unwrap();
        let c = certify_precision(&h, 0.7, &y, &x).unwrap();
        assert!(c.feasible && c.consistent, "{c:?}");
    }
}
