use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tvprox::analysis::{reference_optimum, solve_optima_path};
use tvprox::linalg::{dist, dot, norm, sub};
use tvprox::problem::SmoothFunction;
use tvprox::prox::{prox_exact_in, ProxWorkspace};
use tvprox::Problem;
use tvprox_bench::generators::{
    gen_lasso_stream, gen_least_squares_box, gen_network_flow, gen_quadratic_box, Drift, LassoSpec,
    LeastSquaresSpec, NetworkSpec, QuadraticBoxSpec,
};
use tvprox_bench::topology::NetworkTopology;

fn quadratic(drift: Drift, lower: f64, upper: f64, mu: f64) -> Problem {
    gen_quadratic_box(&QuadraticBoxSpec {
        dimension: 5,
        horizon: 40,
        mu,
        lipschitz: 2.0,
        lower,
        upper,
        drift,
        seed: 9,
    })
    .unwrap()
}

fn least_squares() -> Problem {
    gen_least_squares_box(&LeastSquaresSpec {
        rows: 8,
        horizon: 20,
        dimension: 6,
        rank: 4,
        s_max: 1.5,
        s_min: 0.4,
        lower: 0.0,
        upper: 1.0,
        noise: 0.1,
        drift: Drift::RandomWalk { step: 0.05 },
        seed: 3,
    })
    .unwrap()
}

/// Declared `L_k`, `μ_k` against sampled gradient pairs from each stage's set
/// (or a cube when unconstrained).
fn check_declared_curvature(p: &Problem, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = p.dimension();
    for st in p.stages().iter().step_by(7) {
        let g = &st.smooth;
        assert!(0.0 <= g.strong_convexity() && g.strong_convexity() <= g.lipschitz());
        for _ in 0..30 {
            let (x, y) = match st.nonsmooth.set() {
                Some(s) => (s.sample(&mut rng).unwrap(), s.sample(&mut rng).unwrap()),
                None => (
                    (0..n).map(|_| rng.random_range(-3.0..3.0)).collect(),
                    (0..n).map(|_| rng.random_range(-3.0..3.0)).collect::<Vec<f64>>(),
                ),
            };
            let dg = sub(&g.gradient(&x).unwrap(), &g.gradient(&y).unwrap());
            let dx = sub(&x, &y);
            assert!(norm(&dg) <= g.lipschitz() * norm(&dx) * (1.0 + 1e-10) + 1e-14);
            assert!(dot(&dg, &dx) >= g.strong_convexity() * dot(&dx, &dx) * (1.0 - 1e-10) - 1e-14);
        }
    }
}

#[test]
fn every_generator_declares_valid_curvature() {
    check_declared_curvature(&quadratic(Drift::RandomWalk { step: 0.1 }, 0.0, 1.0, 0.5), 1);
    check_declared_curvature(&least_squares(), 2);
    let lasso = gen_lasso_stream(&LassoSpec {
        dimension: 4,
        horizon: 20,
        weight: 0.3,
        drift: Drift::Sinusoid { amplitude: 0.5, period: 10.0 },
        center: None,
        seed: 1,
    })
    .unwrap();
    check_declared_curvature(&lasso, 3);
    check_declared_curvature(&gen_network_flow(&NetworkSpec::with_defaults(30, 4)).unwrap(), 4);
}

#[test]
fn quadratic_constant_shift_inside_the_box_moves_optimum_by_the_shift() {
    // A wide box keeps every center interior, so the optimum is the center.
    let p = quadratic(Drift::ConstantShift { step: 0.01 }, -100.0, 100.0, 0.5);
    let path = solve_optima_path(&p, 40, 1e-12).unwrap();
    // The shift is a fixed direction scaled to length `step`.
    let step = 0.01;
    for k in 2..=40 {
        assert!((path.sigma[k] - step).abs() < 1e-12, "k={k}: {}", path.sigma[k]);
    }
}

#[test]
fn identity_weights_in_a_large_box_give_the_centers() {
    let p = quadratic(Drift::RandomWalk { step: 0.2 }, -1e3, 1e3, 2.0);
    for k in 1..=40 {
        let x = reference_optimum(&p, k, 1e-12, None).unwrap();
        match p.stage(k).unwrap().smooth.kind() {
            tvprox::problem::SmoothKind::DiagonalQuadratic { weights, center } => {
                assert!(weights.iter().all(|&w| w == 2.0));
                assert_eq!(&x, center);
            }
            other => panic!("unexpected smooth kind {other:?}"),
        }
    }
}

#[test]
fn lasso_dead_zone_pins_the_optimum() {
    let p = gen_lasso_stream(&LassoSpec {
        dimension: 3,
        horizon: 30,
        weight: 1.0,
        drift: Drift::Sinusoid { amplitude: 0.2, period: 12.0 },
        center: Some(vec![0.1, -0.2, 0.3]),
        seed: 0,
    })
    .unwrap();
    let path = solve_optima_path(&p, 30, 1e-12).unwrap();
    assert!(path.optima.iter().all(|x| x.iter().all(|&v| v == 0.0)));
    assert!(path.sigma.iter().all(|&s| s == 0.0));

    let w0 = gen_lasso_stream(&LassoSpec {
        dimension: 2,
        horizon: 1,
        weight: 0.0,
        drift: Drift::None,
        center: Some(vec![2.0, -0.5]),
        seed: 0,
    })
    .unwrap();
    assert_eq!(reference_optimum(&w0, 1, 1e-12, None).unwrap(), vec![2.0, -0.5]);
}

#[test]
fn default_topology_shape() {
    let t = NetworkTopology::six_node();
    assert_eq!(t.nodes, 6);
    assert_eq!(t.edges.len(), 8);
    assert_eq!(t.flows, vec![(1, 3), (4, 6)]);
    let m = t.routing_matrix();
    assert_eq!((m.rows(), m.cols()), (6, 8));
    // Each column has one +1 and one −1 entry.
    for e in 0..8 {
        let col: Vec<f64> = (0..6).map(|i| m.row(i)[e]).collect();
        assert_eq!(col.iter().sum::<f64>(), 0.0);
        assert_eq!(col.iter().map(|v| v.abs()).sum::<f64>(), 2.0);
    }
}

#[test]
fn network_gradient_matches_finite_differences_at_the_anchor() {
    let p = gen_network_flow(&NetworkSpec::with_defaults(10, 11)).unwrap();
    for k in [1, 5, 10] {
        let st = p.stage(k).unwrap();
        let x = st.nonsmooth.set().unwrap().anchor().to_vec();
        let g = st.smooth.gradient(&x).unwrap();
        let h = 1e-6;
        for i in 0..x.len() {
            let (mut a, mut b) = (x.clone(), x.clone());
            a[i] += h;
            b[i] -= h;
            let fd = (st.smooth.value(&a).unwrap() - st.smooth.value(&b).unwrap()) / (2.0 * h);
            assert!((fd - g[i]).abs() <= 1e-6 * (1.0 + g[i].abs()), "k={k} i={i}: {fd} vs {}", g[i]);
        }
    }
}

#[test]
fn network_reference_optimum_has_small_gradient_mapping() {
    let p = gen_network_flow(&NetworkSpec::with_defaults(5, 2)).unwrap();
    for k in 1..=5 {
        let x = reference_optimum(&p, k, 1e-10, None).unwrap();
        let st = p.stage(k).unwrap();
        assert!(st.nonsmooth.set().unwrap().contains(&x));
        let alpha = 1.0 / st.smooth.lipschitz();
        let mut y = x.clone();
        tvprox::linalg::axpy(-alpha, &st.smooth.gradient(&x).unwrap(), &mut y);
        let p = prox_exact_in(&st.nonsmooth, alpha, &y, &mut ProxWorkspace::reference()).unwrap();
        let residual = dist(&x, &p) / alpha;
        assert!(residual <= 1e-10 * (1.0 + norm(&x)), "k={k}: {residual}");
    }
}

#[test]
fn network_shrunk_sets_keep_the_anchor_strictly_inside() {
    let spec = NetworkSpec::with_defaults(50, 6);
    let p = gen_network_flow(&spec).unwrap();
    for st in p.stages() {
        let set = st.nonsmooth.set().unwrap();
        let shrunk = set.shrink(spec.margin).unwrap();
        assert!(shrunk.contains(set.anchor()));
    }
}
