//! The online inexact proximal-gradient loop:
//! `y_k = x_{k−1} − α ∇̃g_k(x_{k−1})`, `x_k ≈_{ε_k} prox_{αh_k}(y_k)`.

use std::fmt;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, check_dim};
use crate::oracle::GradientOracle;
use crate::problem::TimeVaryingProblem;
use crate::prox::{ProxMode, ProxOracleConfig, ProxWorkspace};
use crate::Scalar;

/// Name of the generator behind every run's random stream.
pub const RNG_ALGORITHM: &str = "ChaCha8";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Default + Deserialize<'de>"))]
pub struct SolverConfig<T> {
    /// `α`; the prox parameter `λ` always equals it.
    pub step_size: T,
    pub horizon: usize,
    pub gradient: GradientOracle<T>,
    pub prox: ProxOracleConfig<T>,
    pub x0: Vec<T>,
    pub seed: u64,
}

impl<T: Scalar> SolverConfig<T> {
    /// Exact gradients and exact prox.
    pub fn exact(step_size: T, horizon: usize, x0: Vec<T>) -> Self {
        Self {
            step_size,
            horizon,
            gradient: GradientOracle::Exact,
            prox: ProxOracleConfig::exact(),
            x0,
            seed: 0,
        }
    }

    pub fn validate(&self, problem: &TimeVaryingProblem<T>) -> Result<()> {
        if !(self.step_size > T::zero()) || !self.step_size.is_finite() {
            return Err(Error::param("step_size", format!("must be positive, got {}", self.step_size)));
        }
        if self.horizon == 0 || self.horizon > problem.horizon() {
            return Err(Error::param(
                "horizon",
                format!("need 1 <= K <= {}, got {}", problem.horizon(), self.horizon),
            ));
        }
        check_dim(&self.x0, problem.dimension())?;
        self.gradient.validate()?;
        self.prox.validate()?;
        if let (GradientOracle::ZerothOrder(zo), ProxMode::RestrictedMargin { margin }) =
            (&self.gradient, &self.prox.mode)
        {
            if *margin < zo.radius {
                return Err(Error::param(
                    "margin",
                    format!("restriction margin {margin} must be at least the smoothing radius {}", zo.radius),
                ));
            }
        }
        Ok(())
    }
}

/// One time index of a run. Equality ignores `wall_time`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StepRecord<T> {
    pub k: usize,
    pub x: Vec<T>,
    pub y: Vec<T>,
    /// `‖e_k‖`
    pub error_norm: T,
    /// Certified `ε_k = ‖x_k − prox_{αh_k}(y_k)‖`.
    pub eps: T,
    /// Objective-gap precision of `x_k`.
    pub eps_gap: T,
    /// `f_k(x_k)`
    pub objective: T,
    #[serde(skip)]
    pub wall_time: Duration,
}

impl<T: PartialEq> PartialEq for StepRecord<T> {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k
            && self.x == other.x
            && self.y == other.y
            && self.error_norm == other.error_norm
            && self.eps == other.eps
            && self.eps_gap == other.eps_gap
            && self.objective == other.objective
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RngProvenance {
    pub algorithm: String,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Default + Deserialize<'de>"))]
pub struct RunTrace<T> {
    pub config: SolverConfig<T>,
    /// Starting point actually used (after feasibility repair).
    pub x0: Vec<T>,
    pub x0_repaired: bool,
    pub records: Vec<StepRecord<T>>,
    pub rng: RngProvenance,
}

impl<T: Scalar> RunTrace<T> {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Record for time index `k` (1-based).
    pub fn record(&self, k: usize) -> Option<&StepRecord<T>> {
        k.checked_sub(1).and_then(|i| self.records.get(i))
    }

    /// `x_0, x_1, …, x_K`
    pub fn iterates(&self) -> impl Iterator<Item = &[T]> {
        std::iter::once(self.x0.as_slice()).chain(self.records.iter().map(|r| r.x.as_slice()))
    }
}

/// A run aborted by a step error, with everything computed before it.
#[derive(Debug)]
pub struct RunFailure<T> {
    pub trace: RunTrace<T>,
    pub error: Error,
}

impl<T> fmt::Display for RunFailure<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "run aborted: {}", self.error)
    }
}

impl<T: fmt::Debug> std::error::Error for RunFailure<T> {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// One step `k` from `x_prev`.
pub fn step<T: Scalar, R: rand::Rng + ?Sized>(
    problem: &TimeVaryingProblem<T>,
    k: usize,
    x_prev: &[T],
    config: &SolverConfig<T>,
    rng: &mut R,
) -> Result<StepRecord<T>> {
    step_with(problem, k, x_prev, config, rng, &mut ProxWorkspace::new())
}

/// [`step`] with a reusable prox workspace.
pub fn step_with<T: Scalar, R: rand::Rng + ?Sized>(
    problem: &TimeVaryingProblem<T>,
    k: usize,
    x_prev: &[T],
    config: &SolverConfig<T>,
    rng: &mut R,
    ws: &mut ProxWorkspace<T>,
) -> Result<StepRecord<T>> {
    let started = Instant::now();
    let mut inner = || -> Result<StepRecord<T>> {
        let stage = problem.stage(k)?;
        check_dim(x_prev, problem.dimension())?;
        let alpha = config.step_size;
        let grad = config.gradient.estimate(problem, k, x_prev, rng)?;
        let mut y = x_prev.to_vec();
        linalg::axpy(-alpha, &grad.estimate, &mut y);
        let prox = config.prox.apply(&stage.nonsmooth, alpha, &y, k, rng, ws)?;
        let objective = problem.eval_objective(k, &prox.point)?;
        Ok(StepRecord {
            k,
            x: prox.point,
            y,
            error_norm: grad.error_norm,
            eps: prox.eps_certified,
            eps_gap: prox.eps_gap,
            objective,
            wall_time: Duration::ZERO,
        })
    };
    let mut rec = inner().map_err(|e| e.at_step(k))?;
    rec.wall_time = started.elapsed();
    Ok(rec)
}

/// Runs `k = 1..K`, one gradient estimate and one prox application each.
/// An infeasible `x0` is first projected onto the stage-1 set.
pub fn run<T: Scalar>(
    problem: &TimeVaryingProblem<T>,
    config: &SolverConfig<T>,
) -> std::result::Result<RunTrace<T>, Box<RunFailure<T>>> {
    let mut trace = RunTrace {
        config: config.clone(),
        x0: config.x0.clone(),
        x0_repaired: false,
        records: Vec::with_capacity(config.horizon),
        rng: RngProvenance {
            algorithm: RNG_ALGORITHM.to_owned(),
            seed: config.seed,
        },
    };
    if let Err(error) = config.validate(problem) {
        return Err(Box::new(RunFailure { trace, error }));
    }
    if let Some(set) = problem.stages()[0].nonsmooth.set() {
        if !set.contains(&config.x0) {
            match set.project(&config.x0) {
                Ok(x) => {
                    log::warn!("initial point is infeasible; using its projection onto the first set");
                    trace.x0 = x;
                    trace.x0_repaired = true;
                }
                Err(error) => return Err(Box::new(RunFailure { trace, error })),
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut ws = ProxWorkspace::new();
    for k in 1..=config.horizon {
        let prev = trace.records.last().map_or(&trace.x0, |r| &r.x).clone();
        match step_with(problem, k, &prev, config, &mut rng, &mut ws) {
            Ok(rec) => trace.records.push(rec),
            Err(error) => return Err(Box::new(RunFailure { trace, error })),
        }
    }
    Ok(trace)
}
