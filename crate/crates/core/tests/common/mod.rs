#![allow(dead_code)]

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tvprox::linalg::DenseMatrix;
use tvprox::problem::{FeasibleSet, NonsmoothCost, Polytope};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_vec<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(lo..hi)).collect()
}

/// `[-1, 1]ⁿ` cut by `extra` random halfspaces `aᵀx ≤ b` with `b ≥ 0.2‖a‖`,
/// so the origin is a strict anchor.
pub fn random_polytope<R: Rng>(rng: &mut R, n: usize, extra: usize) -> FeasibleSet<f64> {
    let mut rows = Vec::new();
    let mut bounds = Vec::new();
    for i in 0..n {
        for sign in [1.0, -1.0] {
            let mut r = vec![0.0; n];
            r[i] = sign;
            rows.push(r);
            bounds.push(1.0);
        }
    }
    for _ in 0..extra {
        let a = uniform_vec(rng, n, -1.0, 1.0);
        let an = tvprox::linalg::norm(&a);
        bounds.push(an * rng.random_range(0.2..0.9));
        rows.push(a);
    }
    let a = DenseMatrix::from_rows(&rows).unwrap();
    let poly = Polytope::new(Arc::new(a), bounds, Arc::new(DenseMatrix::zeros(0, n)), vec![]).unwrap();
    FeasibleSet::new_polytope(poly, vec![0.0; n], 2.0 * (n as f64).sqrt()).unwrap()
}

/// l1, group, box, polytope and l1+box costs, selected by `which % 5`.
pub fn family(which: usize, n: usize, seed: u64) -> NonsmoothCost<f64> {
    let cube = || FeasibleSet::cube(n, -1.0, 1.0).unwrap();
    match which % 5 {
        0 => NonsmoothCost::l1(0.3).unwrap(),
        1 => {
            let groups = (0..n).collect::<Vec<_>>().chunks(2).map(<[usize]>::to_vec).collect();
            NonsmoothCost::group(0.4, groups).unwrap()
        }
        2 => NonsmoothCost::indicator(cube()),
        3 => NonsmoothCost::indicator(random_polytope(&mut rng(seed), n, 3)),
        _ => NonsmoothCost::l1(0.2).unwrap().with_set(cube()),
    }
}
