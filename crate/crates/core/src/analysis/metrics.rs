//! Drift and error aggregates, tracking errors and dynamic regret.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::problem::TimeVaryingProblem;
use crate::solver::RunTrace;
use crate::Scalar;

use super::optimum::OptimumMethod;

/// Optimal trajectory `x_0^*, …, x_K^*` with its drift statistics.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimaPath<T> {
    /// Index `k` holds `x_k^*`, `k = 0..K`.
    pub optima: Vec<Vec<T>>,
    /// `σ_k = ‖x_k^* − x_{k−1}^*‖`; index 0 is 0.
    pub sigma: Vec<T>,
    /// `Σ_k = Σ_{i≤k} σ_i`
    pub path_length: Vec<T>,
    /// `Σ̄_k = Σ_{i≤k} σ_i²`
    pub path_length_sq: Vec<T>,
    pub method: OptimumMethod,
}

impl<T: Scalar> OptimaPath<T> {
    /// `K`
    pub fn horizon(&self) -> usize {
        self.optima.len() - 1
    }

    pub fn max_sigma(&self) -> T {
        self.sigma.iter().fold(T::zero(), |m, &s| m.max(s))
    }
}

pub fn path_metrics<T: Scalar>(optima: Vec<Vec<T>>, method: OptimumMethod) -> Result<OptimaPath<T>> {
    let first = optima
        .first()
        .ok_or_else(|| Error::Data("optima path needs at least one point".into()))?;
    let n = first.len();
    for x in &optima {
        linalg::check_dim(x, n)?;
    }
    let mut sigma = vec![T::zero()];
    let mut path_length = vec![T::zero()];
    let mut path_length_sq = vec![T::zero()];
    for w in optima.windows(2) {
        let s = linalg::dist(&w[1], &w[0]);
        sigma.push(s);
        path_length.push(*path_length.last().unwrap() + s);
        path_length_sq.push(*path_length_sq.last().unwrap() + s * s);
    }
    Ok(OptimaPath {
        optima,
        sigma,
        path_length,
        path_length_sq,
        method,
    })
}

/// Running error sums; index `k` covers steps `1..=k`, index 0 is 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorAggregates<T> {
    /// `E_k = Σ ‖e_i‖`
    pub gradient: Vec<T>,
    /// `P_k = Σ ε_i` (certified distance precision)
    pub prox: Vec<T>,
    /// `P̄_k = Σ ε_i²`
    pub prox_sq: Vec<T>,
    /// `Σ ε_i` with the objective-gap precision
    pub prox_gap: Vec<T>,
    /// `Σ ε_i²` with the objective-gap precision
    pub prox_gap_sq: Vec<T>,
}

fn running_sum<T: Scalar>(values: impl Iterator<Item = T>) -> Vec<T> {
    let mut out = vec![T::zero()];
    for v in values {
        let last = *out.last().unwrap();
        out.push(last + v);
    }
    out
}

pub fn error_aggregates<T: Scalar>(trace: &RunTrace<T>) -> ErrorAggregates<T> {
    let r = &trace.records;
    ErrorAggregates {
        gradient: running_sum(r.iter().map(|s| s.error_norm)),
        prox: running_sum(r.iter().map(|s| s.eps)),
        prox_sq: running_sum(r.iter().map(|s| s.eps * s.eps)),
        prox_gap: running_sum(r.iter().map(|s| s.eps_gap)),
        prox_gap_sq: running_sum(r.iter().map(|s| s.eps_gap * s.eps_gap)),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrackingSeries<T> {
    /// `‖x_0 − x_0^*‖`
    pub initial: T,
    /// `‖x_k − x_k^*‖`, `k = 1..K` at index `k − 1`.
    pub error: Vec<T>,
    /// `(1/k) Σ_{i≤k} ‖x_i − x_i^*‖`
    pub running_average: Vec<T>,
}

fn check_aligned<T>(trace: &RunTrace<T>, path: &OptimaPath<T>) -> Result<()> {
    if path.optima.len() != trace.records.len() + 1 {
        return Err(Error::Data(format!(
            "trace has {} steps but the optima path covers {}",
            trace.records.len(),
            path.optima.len().saturating_sub(1)
        )));
    }
    Ok(())
}

pub fn tracking_series<T: Scalar>(trace: &RunTrace<T>, path: &OptimaPath<T>) -> Result<TrackingSeries<T>> {
    check_aligned(trace, path)?;
    let error: Vec<T> = trace
        .records
        .iter()
        .zip(&path.optima[1..])
        .map(|(r, xs)| linalg::dist(&r.x, xs))
        .collect();
    let mut sum = T::zero();
    let running_average = error
        .iter()
        .enumerate()
        .map(|(i, &e)| {
            sum += e;
            sum / T::from_count(i + 1)
        })
        .collect();
    Ok(TrackingSeries {
        initial: linalg::dist(&trace.x0, &path.optima[0]),
        error,
        running_average,
    })
}

/// `Reg_k = Σ_{i≤k} f_i(x_i) − f_i(x_i^*)`, `k = 1..K` at index `k − 1`.
pub fn regret_series<T: Scalar>(
    problem: &TimeVaryingProblem<T>,
    trace: &RunTrace<T>,
    path: &OptimaPath<T>,
) -> Result<Vec<T>> {
    check_aligned(trace, path)?;
    let mut sum = T::zero();
    let mut out = Vec::with_capacity(trace.len());
    for (r, xs) in trace.records.iter().zip(&path.optima[1..]) {
        let fx = problem.eval_objective(r.k, &r.x)?;
        let fs = problem.eval_objective(r.k, xs)?;
        if !fx.is_finite() || !fs.is_finite() {
            return Err(Error::Data(format!(
                "objective at step {} is not finite (iterate {fx}, optimum {fs})",
                r.k
            )));
        }
        sum += fx - fs;
        out.push(sum);
    }
    Ok(out)
}
