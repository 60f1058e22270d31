//! Inexact gradient oracles `∇̃g_k = ∇g_k + e_k`.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::{SmoothFunction, TimeVaryingProblem};
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientModel {
    Exact,
    BoundedNoise,
    ZerothOrder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientEstimate<T> {
    pub estimate: Vec<T>,
    /// `‖e_k‖`, measured against the analytic gradient.
    pub error_norm: T,
    pub model: GradientModel,
}

/// Multi-point bandit estimator settings: `M` evaluations per step (one at
/// the base point), smoothing radius `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZerothOrderConfig<T> {
    pub evaluations: usize,
    pub radius: T,
    #[serde(default)]
    pub antithetic: bool,
}

impl<T: Scalar> ZerothOrderConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if self.evaluations < 2 {
            return Err(Error::param("evaluations", "need M >= 2"));
        }
        if !(self.radius > T::zero()) {
            return Err(Error::param("radius", "smoothing radius must be positive"));
        }
        if self.antithetic && !(self.evaluations - 1).is_multiple_of(2) {
            return Err(Error::param("evaluations", "antithetic pairing needs M - 1 even"));
        }
        Ok(())
    }

    pub fn directions(&self) -> usize {
        self.evaluations - 1
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum GradientOracle<T> {
    #[default]
    Exact,
    BoundedNoise { level: T },
    ZerothOrder(ZerothOrderConfig<T>),
}

impl<T: Scalar> GradientOracle<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            GradientOracle::Exact => Ok(()),
            GradientOracle::BoundedNoise { level } if *level >= T::zero() => Ok(()),
            GradientOracle::BoundedNoise { .. } => {
                Err(Error::param("level", "noise level must be nonnegative"))
            }
            GradientOracle::ZerothOrder(cfg) => cfg.validate(),
        }
    }

    pub fn estimate<R: Rng + ?Sized>(
        &self,
        problem: &TimeVaryingProblem<T>,
        k: usize,
        x: &[T],
        rng: &mut R,
    ) -> Result<GradientEstimate<T>> {
        match self {
            GradientOracle::Exact => estimate_exact(problem, k, x),
            GradientOracle::BoundedNoise { level } => {
                estimate_bounded_noise(problem, k, x, *level, rng)
            }
            GradientOracle::ZerothOrder(cfg) => estimate_zeroth_order(problem, k, x, cfg, rng),
        }
    }
}

/// Uniform direction on the unit sphere in `ℝⁿ` (normalized Gaussian).
pub fn sample_unit_sphere<T: Scalar, R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<T> {
    loop {
        let g: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let nrm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm > 1e-12 {
            return g.into_iter().map(|v| T::lit(v / nrm)).collect();
        }
    }
}

pub fn estimate_exact<T: Scalar>(
    problem: &TimeVaryingProblem<T>,
    k: usize,
    x: &[T],
) -> Result<GradientEstimate<T>> {
    Ok(GradientEstimate {
        estimate: problem.grad_smooth(k, x)?,
        error_norm: T::zero(),
        model: GradientModel::Exact,
    })
}

/// `∇g_k(x) + e` with `e` a uniform direction scaled by a magnitude uniform
/// on `[0, γ]`.
pub fn estimate_bounded_noise<T: Scalar, R: Rng + ?Sized>(
    problem: &TimeVaryingProblem<T>,
    k: usize,
    x: &[T],
    level: T,
    rng: &mut R,
) -> Result<GradientEstimate<T>> {
    if !(level >= T::zero()) {
        return Err(Error::param("level", format!("must be nonnegative, got {level}")));
    }
    let grad = problem.grad_smooth(k, x)?;
    let u: Vec<T> = sample_unit_sphere(x.len(), rng);
    let mag = level * T::lit(rng.random::<f64>());
    let mut estimate = grad.clone();
    linalg::axpy(mag, &u, &mut estimate);
    Ok(GradientEstimate {
        error_norm: linalg::dist(&estimate, &grad),
        estimate,
        model: GradientModel::BoundedNoise,
    })
}

/// `(n / (s (M−1))) Σ_i (g(x + s u_i) − g(x)) u_i` over the given directions.
pub fn zeroth_order_with_directions<T: Scalar, F: SmoothFunction<T> + ?Sized>(
    f: &F,
    x: &[T],
    radius: T,
    directions: &[Vec<T>],
) -> Result<Vec<T>> {
    linalg::check_dim(x, f.dimension())?;
    if directions.is_empty() {
        return Err(Error::param("directions", "need at least one direction"));
    }
    let base = f.value(x)?;
    let mut acc = vec![T::zero(); x.len()];
    let mut probe = x.to_vec();
    for u in directions {
        linalg::check_dim(u, x.len())?;
        for i in 0..x.len() {
            probe[i] = x[i] + radius * u[i];
        }
        let diff = f.value(&probe)? - base;
        linalg::axpy(diff, u, &mut acc);
    }
    let scale = T::from_count(x.len()) / (radius * T::from_count(directions.len()));
    Ok(acc.into_iter().map(|v| v * scale).collect())
}

/// Draws the `M − 1` estimator directions (antithetic pairs `±u` when configured).
pub fn draw_directions<T: Scalar, R: Rng + ?Sized>(
    n: usize,
    cfg: &ZerothOrderConfig<T>,
    rng: &mut R,
) -> Vec<Vec<T>> {
    let m = cfg.directions();
    if cfg.antithetic {
        let mut out = Vec::with_capacity(m);
        for _ in 0..m / 2 {
            let u: Vec<T> = sample_unit_sphere(n, rng);
            out.push(u.iter().map(|&v| -v).collect());
            out.push(u);
        }
        out
    } else {
        (0..m).map(|_| sample_unit_sphere(n, rng)).collect()
    }
}

pub fn estimate_zeroth_order<T: Scalar, R: Rng + ?Sized>(
    problem: &TimeVaryingProblem<T>,
    k: usize,
    x: &[T],
    cfg: &ZerothOrderConfig<T>,
    rng: &mut R,
) -> Result<GradientEstimate<T>> {
    cfg.validate()?;
    let g = &problem.stage(k)?.smooth;
    let dirs = draw_directions(x.len(), cfg, rng);
    let estimate = zeroth_order_with_directions(g, x, cfg.radius, &dirs)?;
    let grad = g.gradient(x)?;
    Ok(GradientEstimate {
        error_norm: linalg::dist(&estimate, &grad),
        estimate,
        model: GradientModel::ZerothOrder,
    })
}
