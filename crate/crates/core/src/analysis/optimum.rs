//! Reference minimizers `x_k^*` of each stage.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, check_dim};
use crate::problem::{NonsmoothCost, Regularizer, SetKind, SmoothFunction, SmoothKind, Stage, TimeVaryingProblem};
use crate::prox::{prox_exact_in, ProxWorkspace};
use crate::Scalar;

use super::metrics::{path_metrics, OptimaPath};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum OptimumMethod {
    ClosedForm,
    /// Accelerated proximal gradient to the given gradient-mapping tolerance.
    Numerical { tolerance: f64 },
}

/// Minimizer of `½Σq_i(x_i − b_i)² + h(x)` when it separates by coordinate.
fn separable_quadratic<T: Scalar>(weights: &[T], center: &[T], h: &NonsmoothCost<T>) -> Option<Vec<T>> {
    if weights.iter().any(|&q| !(q > T::zero())) {
        return None;
    }
    let w = match h.regularizer() {
        Regularizer::Zero => T::zero(),
        Regularizer::L1 { weight } => *weight,
        Regularizer::Group { .. } => return None,
    };
    let bounds = match h.set().map(|s| s.kind()) {
        None => None,
        Some(SetKind::Box { lower, upper }) => Some((lower, upper)),
        Some(_) => return None,
    };
    Some(
        (0..weights.len())
            .map(|i| {
                let b = center[i];
                let t = w / weights[i];
                let v = b.signum() * (b.abs() - t).max(T::zero());
                match bounds {
                    Some((lo, hi)) => v.max(lo[i]).min(hi[i]),
                    None => v,
                }
            })
            .collect(),
    )
}

fn closed_form<T: Scalar>(stage: &Stage<T>) -> Option<Vec<T>> {
    match stage.smooth.kind() {
        SmoothKind::DiagonalQuadratic { weights, center } => {
            separable_quadratic(weights, center, &stage.nonsmooth)
        }
        _ => None,
    }
}

/// `‖x − prox_{αh}(x − α∇g(x))‖ / α`
fn gradient_mapping<T: Scalar>(
    stage: &Stage<T>,
    alpha: T,
    x: &[T],
    ws: &mut ProxWorkspace<T>,
) -> Result<(T, Vec<T>)> {
    let g = stage.smooth.gradient(x)?;
    let mut y = x.to_vec();
    linalg::axpy(-alpha, &g, &mut y);
    let p = prox_exact_in(&stage.nonsmooth, alpha, &y, ws)?;
    Ok((linalg::dist(x, &p) / alpha, p))
}

/// `x_k^*`: analytic for separable quadratic stages, otherwise accelerated
/// proximal gradient (gradient-based restarts, step `1/L_k`) until the
/// gradient-mapping norm is at most `tol (1 + ‖x‖)`.
pub fn reference_optimum<T: Scalar>(
    problem: &TimeVaryingProblem<T>,
    k: usize,
    tol: T,
    warm_start: Option<&[T]>,
) -> Result<Vec<T>> {
    reference_optimum_with(problem, k, tol, warm_start).map(|(x, _)| x)
}

pub(crate) fn reference_optimum_with<T: Scalar>(
    problem: &TimeVaryingProblem<T>,
    k: usize,
    tol: T,
    warm_start: Option<&[T]>,
) -> Result<(Vec<T>, OptimumMethod)> {
    let stage = problem.stage(k)?;
    if let Some(x) = closed_form(stage) {
        return Ok((x, OptimumMethod::ClosedForm));
    }
    if !(tol > T::zero()) {
        return Err(Error::param("tol", "must be positive"));
    }
    let n = problem.dimension();
    let alpha = T::one() / stage.smooth.lipschitz();
    let mut ws = ProxWorkspace::reference();
    let start = match warm_start {
        Some(w) => {
            check_dim(w, n)?;
            w.to_vec()
        }
        None => stage
            .nonsmooth
            .set()
            .map_or_else(|| vec![T::zero(); n], |s| s.anchor().to_vec()),
    };
    let mut x = prox_exact_in(&stage.nonsmooth, alpha, &start, &mut ws)?;
    let mut z = x.clone();
    let mut t = T::one();
    let mut residual = T::infinity();
    let half = T::lit(0.5);
    for _ in 0..MAX_ITERATIONS {
        // A step from the extrapolated point; fall back to x when z leaves the
        // smooth part's domain.
        let (res_z, x_next) = match gradient_mapping(stage, alpha, &z, &mut ws) {
            Ok(v) => v,
            Err(Error::Domain { .. }) => {
                z = x.clone();
                t = T::one();
                gradient_mapping(stage, alpha, &z, &mut ws)?
            }
            Err(e) => return Err(e),
        };
        residual = res_z;
        if res_z <= tol * (T::one() + linalg::norm(&z)) {
            // z may sit outside the feasible set; certify the prox point instead.
            let (res_x, _) = gradient_mapping(stage, alpha, &x_next, &mut ws)?;
            if res_x <= tol * (T::one() + linalg::norm(&x_next)) {
                return Ok((x_next, OptimumMethod::Numerical { tolerance: tol.as_f64() }));
            }
        }
        let t_next = half * (T::one() + (T::one() + T::lit(4.0) * t * t).sqrt());
        let restart = linalg::dot(&linalg::sub(&z, &x_next), &linalg::sub(&x_next, &x)) > T::zero();
        let mom = if restart { T::zero() } else { (t - T::one()) / t_next };
        let mut z_next = x_next.clone();
        linalg::axpy(mom, &linalg::sub(&x_next, &x), &mut z_next);
        x = x_next;
        z = z_next;
        t = if restart { T::one() } else { t_next };
    }
    Err(Error::NoConvergence {
        method: "accelerated proximal gradient",
        iterations: MAX_ITERATIONS,
        residual: residual.as_f64(),
    })
}

/// `x_0^*, x_1^*, …, x_K^*`, each stage warm-started from the previous optimum.
/// `x_0^*` is taken to be the minimizer of the first stage.
pub fn solve_optima_path<T: Scalar>(
    problem: &TimeVaryingProblem<T>,
    horizon: usize,
    tol: T,
) -> Result<OptimaPath<T>> {
    if horizon == 0 || horizon > problem.horizon() {
        return Err(Error::IndexOutOfRange {
            k: horizon,
            horizon: problem.horizon(),
        });
    }
    let mut optima = Vec::with_capacity(horizon + 1);
    let mut numerical = false;
    let mut prev: Option<Vec<T>> = None;
    for k in 1..=horizon {
        let (x, method) = reference_optimum_with(problem, k, tol, prev.as_deref())
            .map_err(|e| e.at_step(k))?;
        numerical |= matches!(method, OptimumMethod::Numerical { .. });
        if k == 1 {
            optima.push(x.clone());
        }
        optima.push(x.clone());
        prev = Some(x);
    }
    let method = if numerical {
        OptimumMethod::Numerical { tolerance: tol.as_f64() }
    } else {
        OptimumMethod::ClosedForm
    };
    path_metrics(optima, method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::{FeasibleSet, SmoothCost};
    use std::sync::Arc;

    #[test]
    fn lasso_optimum_is_soft_threshold() {
        let b = vec![2.0, -0.3, 0.7, -1.5];
        let stage = Stage {
            smooth: SmoothCost::centered(b.clone()).unwrap(),
            nonsmooth: NonsmoothCost::l1(0.5).unwrap(),
        };
        let p = TimeVaryingProblem::stationary(stage, 1).unwrap();
        let x = reference_optimum(&p, 1, 1e-10, None).unwrap();
        let want: Vec<f64> = b.iter().map(|v: &f64| v.signum() * (v.abs() - 0.5).max(0.0)).collect();
        assert!(linalg::dist(&x, &want) < 1e-8);
    }

    #[test]
    fn numerical_path_agrees_with_clamp_for_least_squares_identity() {
        // ½‖I x − b‖² over a box: minimizer is clamp(b).
        let a = Arc::new(crate::linalg::DenseMatrix::identity(3));
        let b = vec![1.7, -0.4, 0.25];
        let stage = Stage {
            smooth: SmoothCost::least_squares(a, b.clone(), 1.0, 1.0).unwrap(),
            nonsmooth: NonsmoothCost::indicator(FeasibleSet::cube(3, 0.0, 1.0).unwrap()),
        };
        let p = TimeVaryingProblem::stationary(stage, 1).unwrap();
        let x = reference_optimum(&p, 1, 1e-12, None).unwrap();
        assert!(linalg::dist(&x, &[1.0, 0.0, 0.25]) < 1e-10);
    }
}
