//! Seeded problem families used by the experiments.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use tvprox::linalg::{self, DenseMatrix};
use tvprox::oracle::sample_unit_sphere;
use tvprox::problem::NetworkUtility;
use tvprox::{FeasibleSet, NonsmoothCost, Polytope, Problem, SmoothCost, Stage};

use crate::topology::NetworkTopology;
use crate::BenchError;

/// How the data vector of a stream moves from one stage to the next.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Drift {
    #[default]
    None,
    /// `b_k = b_{k−1} + step·u` for one fixed random unit direction `u`.
    ConstantShift { step: f64 },
    /// `b_k = b_{k−1} + r·u_k`, `u_k` uniform on the sphere, `r` uniform on `[0, step]`.
    RandomWalk { step: f64 },
    /// `b_k = b_1 + amplitude · sin(2πk/period + φ)` with random per-coordinate phases.
    Sinusoid { amplitude: f64, period: f64 },
}

impl Drift {
    pub fn validate(&self) -> Result<(), BenchError> {
        let ok = match *self {
            Drift::None => true,
            Drift::ConstantShift { step } | Drift::RandomWalk { step } => step >= 0.0 && step.is_finite(),
            Drift::Sinusoid { amplitude, period } => amplitude >= 0.0 && period > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(BenchError::Config(format!("invalid drift parameters {self:?}")))
        }
    }

    /// `b_1, …, b_K` starting from `b_1 = start`; `fold` keeps each
    /// coordinate inside an interval by reflection.
    pub fn path<R: Rng>(
        &self,
        start: &[f64],
        horizon: usize,
        fold: Option<(f64, f64)>,
        rng: &mut R,
    ) -> Result<Vec<Vec<f64>>, BenchError> {
        self.validate()?;
        let n = start.len();
        let mut out = Vec::with_capacity(horizon);
        out.push(start.to_vec());
        match *self {
            Drift::None => out.resize(horizon, start.to_vec()),
            Drift::ConstantShift { step } => {
                let u: Vec<f64> = sample_unit_sphere(n, rng);
                for _ in 1..horizon {
                    let mut b = out.last().unwrap().clone();
                    linalg::axpy(step, &u, &mut b);
                    out.push(fold_into(b, fold));
                }
            }
            Drift::RandomWalk { step } => {
                for _ in 1..horizon {
                    let u: Vec<f64> = sample_unit_sphere(n, rng);
                    let r = step * rng.random::<f64>();
                    let mut b = out.last().unwrap().clone();
                    linalg::axpy(r, &u, &mut b);
                    out.push(fold_into(b, fold));
                }
            }
            Drift::Sinusoid { amplitude, period } => {
                let phase: Vec<f64> = (0..n).map(|_| 2.0 * PI * rng.random::<f64>()).collect();
                for k in 1..horizon {
                    let b = (0..n)
                        .map(|i| {
                            let w = 2.0 * PI / period;
                            start[i] + amplitude * ((w * k as f64 + phase[i]).sin() - phase[i].sin())
                        })
                        .collect();
                    out.push(fold_into(b, fold));
                }
            }
        }
        Ok(out)
    }
}

/// Reflects each coordinate into `[lo, hi]` (1-Lipschitz, identity inside).
fn fold_into(mut b: Vec<f64>, fold: Option<(f64, f64)>) -> Vec<f64> {
    if let Some((lo, hi)) = fold {
        let width = hi - lo;
        for v in b.iter_mut().filter(|v| **v < lo || **v > hi) {
            let t = (*v - lo).rem_euclid(2.0 * width);
            *v = lo + if t > width { 2.0 * width - t } else { t };
        }
    }
    b
}

fn core(e: tvprox::Error) -> BenchError {
    BenchError::Core(e)
}

/// `g_k = ½ Σ q_i (x_i − b_{k,i})²` over the box `[lower, upper]ⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticBoxSpec {
    pub dimension: usize,
    pub horizon: usize,
    pub mu: f64,
    pub lipschitz: f64,
    #[serde(default)]
    pub lower: f64,
    #[serde(default = "one")]
    pub upper: f64,
    #[serde(default)]
    pub drift: Drift,
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

/// Curvatures `q` have `min q = μ`, `max q = L`; the centers start uniformly
/// in the box and drift inside the box widened by half its side.
pub fn gen_quadratic_box(spec: &QuadraticBoxSpec) -> Result<Problem, BenchError> {
    let n = spec.dimension;
    if n == 0 || spec.horizon == 0 {
        return Err(BenchError::Config("dimension and horizon must be positive".into()));
    }
    if !(spec.mu > 0.0 && spec.mu <= spec.lipschitz) {
        return Err(BenchError::Config("need 0 < mu <= lipschitz".into()));
    }
    if n == 1 && spec.mu != spec.lipschitz {
        return Err(BenchError::Config("one coordinate cannot carry distinct mu and L".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut q: Vec<f64> = (0..n)
        .map(|_| spec.mu + (spec.lipschitz - spec.mu) * rng.random::<f64>())
        .collect();
    q[0] = spec.mu;
    q[n - 1] = spec.lipschitz;
    let (lo, hi) = (spec.lower, spec.upper);
    let start: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
    let pad = 0.5 * (hi - lo);
    let centers = spec.drift.path(&start, spec.horizon, Some((lo - pad, hi + pad)), &mut rng)?;
    let set = FeasibleSet::cube(n, lo, hi).map_err(core)?;
    let stages = centers
        .into_iter()
        .map(|b| {
            Ok(Stage {
                smooth: SmoothCost::diagonal_quadratic(q.clone(), b)?,
                nonsmooth: NonsmoothCost::indicator(set.clone()),
            })
        })
        .collect::<tvprox::Result<Vec<_>>>()
        .map_err(core)?;
    Problem::new(n, 1.0, stages).map_err(core)
}

/// `g_k = ½‖x − b_k‖²`, `h = w‖x‖₁`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LassoSpec {
    pub dimension: usize,
    pub horizon: usize,
    pub weight: f64,
    #[serde(default)]
    pub drift: Drift,
    /// `b_1`; drawn uniformly from `[−2, 2]ⁿ` when absent.
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    pub seed: u64,
}

pub fn gen_lasso_stream(spec: &LassoSpec) -> Result<Problem, BenchError> {
    let n = spec.dimension;
    if n == 0 || spec.horizon == 0 || !(spec.weight >= 0.0) {
        return Err(BenchError::Config("need positive sizes and a nonnegative weight".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let start = match &spec.center {
        Some(c) if c.len() == n => c.clone(),
        Some(c) => {
            return Err(BenchError::Config(format!("center has {} entries, expected {n}", c.len())))
        }
        None => (0..n).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect(),
    };
    let centers = spec.drift.path(&start, spec.horizon, None, &mut rng)?;
    let h = NonsmoothCost::l1(spec.weight).map_err(core)?;
    let stages = centers
        .into_iter()
        .map(|b| {
            Ok(Stage {
                smooth: SmoothCost::centered(b)?,
                nonsmooth: h.clone(),
            })
        })
        .collect::<tvprox::Result<Vec<_>>>()
        .map_err(core)?;
    Problem::new(n, 1.0, stages).map_err(core)
}

/// `g_k = ½‖A x − b_k‖²` over a box with `A` of deficient rank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeastSquaresSpec {
    pub rows: usize,
    pub horizon: usize,
    pub dimension: usize,
    pub rank: usize,
    #[serde(default = "one")]
    pub s_max: f64,
    #[serde(default = "default_s_min")]
    pub s_min: f64,
    #[serde(default)]
    pub lower: f64,
    #[serde(default = "one")]
    pub upper: f64,
    /// Scale of a fixed residual added to every target.
    #[serde(default)]
    pub noise: f64,
    #[serde(default)]
    pub drift: Drift,
    pub seed: u64,
}

fn default_s_min() -> f64 {
    0.3
}

/// Orthonormal columns (`rows × cols`) by Gram–Schmidt on Gaussian columns.
fn orthonormal_columns<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let normal = Normal::new(0.0, 1.0).expect("unit normal");
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(cols);
    while basis.len() < cols {
        let mut v: Vec<f64> = (0..rows).map(|_| normal.sample(rng)).collect();
        for _ in 0..2 {
            for b in &basis {
                let c = linalg::dot(&v, b);
                linalg::axpy(-c, b, &mut v);
            }
        }
        let nrm = linalg::norm(&v);
        if nrm > 1e-8 {
            basis.push(linalg::scaled(&v, 1.0 / nrm));
        }
    }
    basis
}

/// `A = U diag(s) Vᵀ` with `s_1 = s_max`, `s_r = s_min`, so `L = s_max²`
/// and `μ = 0` whenever `rank < dimension`. Targets are `A c_k` plus a fixed
/// residual, with `c_k` drifting around a point of the box.
pub fn gen_least_squares_box(spec: &LeastSquaresSpec) -> Result<Problem, BenchError> {
    let (m, n, r) = (spec.rows, spec.dimension, spec.rank);
    if n == 0 || m == 0 || r == 0 || r > m.min(n) || spec.s_min <= 0.0 || spec.s_max < spec.s_min {
        return Err(BenchError::Config("need 1 <= rank <= min(rows, dimension) and 0 < s_min <= s_max".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let u = orthonormal_columns(m, r, &mut rng);
    let v = orthonormal_columns(n, r, &mut rng);
    let mut s: Vec<f64> = (0..r)
        .map(|_| spec.s_min + (spec.s_max - spec.s_min) * rng.random::<f64>())
        .collect();
    s[0] = spec.s_max;
    s[r - 1] = spec.s_min;
    let mut a = DenseMatrix::zeros(m, n);
    for j in 0..r {
        for row in 0..m {
            for col in 0..n {
                a[(row, col)] += s[j] * u[j][row] * v[j][col];
            }
        }
    }
    let a = Arc::new(a);
    let (lo, hi) = (spec.lower, spec.upper);
    let start: Vec<f64> = (0..n).map(|_| lo + (hi - lo) * rng.random::<f64>()).collect();
    let residual: Vec<f64> = sample_unit_sphere::<f64, _>(m, &mut rng)
        .into_iter()
        .map(|v| v * spec.noise)
        .collect();
    let pad = 0.5 * (hi - lo);
    let centers = spec.drift.path(&start, spec.horizon, Some((lo - pad, hi + pad)), &mut rng)?;
    let set = FeasibleSet::cube(n, lo, hi).map_err(core)?;
    let l = spec.s_max * spec.s_max;
    let mu = if r < n { 0.0 } else { spec.s_min * spec.s_min };
    let stages = centers
        .into_iter()
        .map(|c| {
            let target = linalg::add(&a.matvec(&c), &residual);
            Ok(Stage {
                smooth: SmoothCost::least_squares(Arc::clone(&a), target, l, mu)?,
                nonsmooth: NonsmoothCost::indicator(set.clone()),
            })
        })
        .collect::<tvprox::Result<Vec<_>>>()
        .map_err(core)?;
    Problem::new(n, 1.0, stages).map_err(core)
}

/// Multi-flow network utility maximization over time-varying links.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    #[serde(default = "NetworkTopology::six_node")]
    pub topology: NetworkTopology,
    pub horizon: usize,
    #[serde(default = "default_nu")]
    pub nu: f64,
    #[serde(default = "default_z_max")]
    pub z_max: f64,
    /// Tightening applied by restricted-set projections; the generated
    /// sets keep their anchors strictly inside after this shrink.
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// Mean of the complex channel gain, `(re, im)`.
    #[serde(default = "default_gain_mean")]
    pub gain_mean: (f64, f64),
    /// Variance of each gain component.
    #[serde(default = "default_gain_var")]
    pub gain_var: f64,
    #[serde(default = "one")]
    pub power_mean: f64,
    #[serde(default = "default_power_var")]
    pub power_var: f64,
    /// Increment variance of the exogenous traffic random walk.
    #[serde(default = "default_gain_var")]
    pub traffic_var: f64,
    #[serde(default = "default_traffic_start")]
    pub traffic_start: f64,
    /// Link capacity kept free of exogenous traffic beyond the margin.
    #[serde(default = "default_headroom")]
    pub headroom: f64,
    #[serde(default = "one")]
    pub kappa_start: f64,
    /// Standard deviation of the utility-weight random walk increments.
    #[serde(default = "default_kappa_step")]
    pub kappa_step: f64,
    #[serde(default = "default_kappa_range")]
    pub kappa_range: (f64, f64),
    pub seed: u64,
}

fn default_nu() -> f64 {
    0.5
}
fn default_z_max() -> f64 {
    1.0
}
fn default_margin() -> f64 {
    0.05
}
fn default_gain_mean() -> (f64, f64) {
    (1.0, 1.0)
}
fn default_gain_var() -> f64 {
    1e-2
}
fn default_power_var() -> f64 {
    1e-3
}
fn default_traffic_start() -> f64 {
    0.3
}
fn default_headroom() -> f64 {
    0.25
}
fn default_kappa_step() -> f64 {
    0.05
}
fn default_kappa_range() -> (f64, f64) {
    (0.5, 1.5)
}

impl NetworkSpec {
    pub fn with_defaults(horizon: usize, seed: u64) -> Self {
        Self {
            topology: NetworkTopology::six_node(),
            horizon,
            nu: default_nu(),
            z_max: default_z_max(),
            margin: default_margin(),
            gain_mean: default_gain_mean(),
            gain_var: default_gain_var(),
            power_mean: 1.0,
            power_var: default_power_var(),
            traffic_var: default_gain_var(),
            traffic_start: default_traffic_start(),
            headroom: default_headroom(),
            kappa_start: 1.0,
            kappa_step: default_kappa_step(),
            kappa_range: default_kappa_range(),
            seed,
        }
    }

    /// Dimension of the link-rate variable: one block of links per flow.
    pub fn dimension(&self) -> usize {
        self.topology.links() * self.topology.flows.len()
    }
}

/// Constraint rows shared by every stage of a network problem (only the
/// right-hand sides vary with `k`). Variable layout: `x[s·E + e]`.
struct NetworkRows {
    inequalities: Arc<DenseMatrix<f64>>,
    margin_weights: Arc<Vec<f64>>,
    equalities: Arc<DenseMatrix<f64>>,
}

fn network_rows(topology: &NetworkTopology) -> (NetworkRows, Vec<Vec<f64>>) {
    let e_count = topology.links();
    let flows = &topology.flows;
    let n = e_count * flows.len();
    let routing = topology.routing_matrix();
    let mut ineq: Vec<Vec<f64>> = Vec::new();
    let mut weights = Vec::new();
    // Link rates are nonnegative; this is not tightened.
    for j in 0..n {
        let mut row = vec![0.0; n];
        row[j] = -1.0;
        ineq.push(row);
        weights.push(0.0);
    }
    // Capacity: Σ_s x(e, s) ≤ c_e − w_e and −Σ_s x(e, s) ≤ w_e.
    for sign in [1.0, -1.0] {
        for e in 0..e_count {
            let mut row = vec![0.0; n];
            for s in 0..flows.len() {
                row[s * e_count + e] = sign;
            }
            ineq.push(row);
            weights.push(1.0);
        }
    }
    // Injected rate at each source: 0 ≤ T_src x_s ≤ z_max.
    let mut source_rows = Vec::new();
    for (s, &(src, _)) in flows.iter().enumerate() {
        let t: Vec<f64> = routing.row(src - 1).to_vec();
        for sign in [1.0, -1.0] {
            let mut row = vec![0.0; n];
            for e in 0..e_count {
                row[s * e_count + e] = sign * t[e];
            }
            ineq.push(row);
            weights.push(1.0);
        }
        source_rows.push(t);
    }
    // Conservation at every node other than the flow's endpoints.
    let mut eq: Vec<Vec<f64>> = Vec::new();
    for (s, &(src, dst)) in flows.iter().enumerate() {
        for i in 1..=topology.nodes {
            if i == src || i == dst {
                continue;
            }
            let t = routing.row(i - 1);
            if t.iter().all(|&v| v == 0.0) {
                continue;
            }
            let mut row = vec![0.0; n];
            for e in 0..e_count {
                row[s * e_count + e] = t[e];
            }
            eq.push(row);
        }
    }
    let rows = NetworkRows {
        inequalities: Arc::new(DenseMatrix::from_rows(&ineq).expect("uniform rows")),
        margin_weights: Arc::new(weights),
        equalities: Arc::new(if eq.is_empty() {
            DenseMatrix::zeros(0, n)
        } else {
            DenseMatrix::from_rows(&eq).expect("uniform rows")
        }),
    };
    (rows, source_rows)
}

fn network_bounds(topology: &NetworkTopology, capacity: &[f64], traffic: &[f64], z_max: f64) -> Vec<f64> {
    let n = topology.links() * topology.flows.len();
    let mut b = vec![0.0; n];
    b.extend(capacity.iter().zip(traffic).map(|(c, w)| c - w));
    b.extend(traffic.iter().copied());
    for _ in &topology.flows {
        b.push(z_max);
        b.push(0.0);
    }
    b
}

/// Path rate plus circulations around cycles through every link, so every
/// rate and every source injection is strictly positive.
fn anchor_template(topology: &NetworkTopology) -> Result<(Vec<f64>, Vec<f64>), BenchError> {
    let e_count = topology.links();
    let n = e_count * topology.flows.len();
    let mut path = vec![0.0; n];
    let mut circ = vec![0.0; n];
    let cycles = topology.covering_cycles();
    for (s, &(src, dst)) in topology.flows.iter().enumerate() {
        for e in topology.shortest_path(src, dst).expect("validated topology") {
            path[s * e_count + e] += 1.0;
        }
        for cyc in &cycles {
            for &e in cyc {
                circ[s * e_count + e] += 1.0;
            }
        }
    }
    if circ.iter().take(n).any(|&v| v == 0.0) {
        return Err(BenchError::Config(
            "every link must lie on a directed cycle to build a strictly feasible anchor".into(),
        ));
    }
    Ok((path, circ))
}

/// `c = log(1 + |g|² p)` with complex Gaussian gain `g` and Gaussian power `p`.
const MAX_CAPACITY_REDRAWS: usize = 16;

fn sample_capacity<R: Rng>(spec: &NetworkSpec, rng: &mut R) -> f64 {
    let g = Normal::new(0.0, spec.gain_var.sqrt()).expect("finite variance");
    let p = Normal::new(spec.power_mean, spec.power_var.sqrt()).expect("finite variance");
    let re = spec.gain_mean.0 + g.sample(rng);
    let im = spec.gain_mean.1 + g.sample(rng);
    let power = p.sample(rng).max(0.0);
    (1.0 + (re * re + im * im) * power).ln()
}

/// Network utility maximization: `g_k(x) = −Σ_s κ_{k,s} log(1 + t_s·x_s) + (ν/2)‖x‖²`
/// subject to link capacities `c_k` shared with exogenous traffic `w_k`,
/// source injection limits and flow conservation.
pub fn gen_network_flow(spec: &NetworkSpec) -> Result<Problem, BenchError> {
    spec.topology.validate()?;
    if !(spec.nu > 0.0) || spec.horizon == 0 || !(spec.margin >= 0.0) || !(spec.z_max > spec.margin) {
        return Err(BenchError::Config("need nu > 0, horizon >= 1, 0 <= margin < z_max".into()));
    }
    let topo = &spec.topology;
    let e_count = topo.links();
    let n = spec.dimension();
    let (rows, source_rows) = network_rows(topo);
    let source_rows = Arc::new(source_rows);
    let (path, circ) = anchor_template(topo)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let walk = Normal::new(0.0, spec.traffic_var.sqrt()).map_err(|e| BenchError::Config(e.to_string()))?;
    let kappa_walk = Normal::new(0.0, spec.kappa_step).map_err(|e| BenchError::Config(e.to_string()))?;
    let mut traffic = vec![spec.traffic_start; e_count];
    let mut kappa = vec![spec.kappa_start; topo.flows.len()];
    let floor = spec.margin + 0.05;
    let mut stages = Vec::with_capacity(spec.horizon);
    for k in 1..=spec.horizon {
        let mut capacity: Vec<f64> = (0..e_count).map(|_| sample_capacity(spec, &mut rng)).collect();
        for (e, w) in traffic.iter_mut().enumerate() {
            let step = if k == 1 { 0.0 } else { walk.sample(&mut rng) };
            let mut redraws = 0;
            while capacity[e] - spec.margin - spec.headroom <= floor {
                if redraws == MAX_CAPACITY_REDRAWS {
                    return Err(BenchError::Config(format!(
                        "link {e} capacity {:.3} leaves no room for traffic at stage {k}",
                        capacity[e]
                    )));
                }
                log::warn!("stage {k}: capacity {:.3} on link {e} too small, redrawing", capacity[e]);
                capacity[e] = sample_capacity(spec, &mut rng);
                redraws += 1;
            }
            let ceiling = capacity[e] - spec.margin - spec.headroom;
            let next = *w + step;
            if next > ceiling || next < floor {
                log::debug!("stage {k}: clamping traffic on link {e}");
            }
            *w = next.clamp(floor, ceiling);
        }
        for v in kappa.iter_mut() {
            let step = if k == 1 { 0.0 } else { kappa_walk.sample(&mut rng) };
            *v = (*v + step).clamp(spec.kappa_range.0, spec.kappa_range.1);
        }
        let bounds = network_bounds(topo, &capacity, &traffic, spec.z_max);
        let polytope = Polytope::with_margin_weights(
            Arc::clone(&rows.inequalities),
            bounds,
            Arc::clone(&rows.equalities),
            vec![0.0; rows.equalities.rows()],
            Arc::clone(&rows.margin_weights),
        )
        .map_err(core)?;
        let anchor = strict_anchor(&polytope, &path, &circ, spec.margin)?;
        let free: Vec<f64> = capacity.iter().zip(&traffic).map(|(c, w)| c - w).collect();
        let spread = if topo.flows.len() > 1 { 2.0 } else { 1.0 };
        let diameter = (spread * free.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let set = FeasibleSet::new_polytope(polytope, anchor, diameter).map_err(core)?;
        let utility = NetworkUtility {
            links: e_count,
            source_rows: Arc::clone(&source_rows),
            kappa: kappa.clone(),
            nu: spec.nu,
        };
        stages.push(Stage {
            smooth: SmoothCost::network_utility(utility).map_err(core)?,
            nonsmooth: NonsmoothCost::indicator(set),
        });
    }
    debug_assert_eq!(stages[0].nonsmooth.set().unwrap().dimension(), n);
    Problem::new(n, 1.0, stages).map_err(core)
}

/// Scales the path/circulation template down until the point is strictly
/// inside the polytope tightened by `margin`.
fn strict_anchor(p: &Polytope, path: &[f64], circ: &[f64], margin: f64) -> Result<Vec<f64>, BenchError> {
    let weights_slack = |x: &[f64]| {
        let a = p.inequalities();
        (0..a.rows())
            .map(|j| {
                let w = if j < x.len() { 0.0 } else { 1.0 };
                p.bounds()[j] - w * margin - linalg::dot(a.row(j), x)
            })
            .fold(f64::INFINITY, f64::min)
    };
    let mut tau = 0.5;
    for _ in 0..60 {
        let mut x = linalg::scaled(path, tau);
        linalg::axpy(0.25 * tau, circ, &mut x);
        if weights_slack(&x) > 0.0 {
            return Ok(x);
        }
        tau *= 0.5;
    }
    Err(BenchError::Config("could not place a strictly feasible anchor".into()))
}
