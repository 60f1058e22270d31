//! Computable right-hand sides of the tracking and regret bounds, compared
//! against measured quantities.
//!
//! Notation: `e_k = ‖x_k − x_k^*‖`, `ρ_k = max{|1−αμ_k|, |1−αL_k|}`,
//! `ρ = sup ρ_k`, `σ_k`, `Σ_k`, `Σ̄_k` from the optima path, and
//! `E_k`, `P_k`, `P̄_k` from the error aggregates.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::ProblemConstants;
use crate::solver::RunTrace;
use crate::Scalar;

use super::metrics::{tracking_series, ErrorAggregates, OptimaPath};

/// Relative tolerance of every bound comparison.
pub const BOUND_RTOL: f64 = 1e-9;

/// `measured ≤ rhs + 1e−9 (1 + rhs)`
pub fn bound_holds<T: Scalar>(measured: T, rhs: T) -> bool {
    measured <= rhs + T::lit(BOUND_RTOL) * (T::one() + rhs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `e_k ≤ ρ_k e_{k−1} + ρ_k σ_k + α‖e_k‖ + ε_k`
    OneStepTracking,
    /// The one-step bound unrolled down to `e_0`.
    UnrolledTracking,
    /// `Σ_{i≤k} e_i ≤ (ρ e_0 + ρ Σ_k + P_k + α E_k) / (1 − ρ)`
    CumulativeTracking,
    /// `max_{k ≥ K/2} e_k ≤ (α γ_e + γ_ε + ρ σ) / (1 − ρ)`
    AsymptoticTracking,
    /// `Reg_k ≤ D (ρ e_0 + ρ Σ_k + P_k + α E_k) / (1 − ρ)`
    RegretStronglyConvex,
    /// Convex compact case; see [`convex_regret_rhs`].
    RegretConvex,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::OneStepTracking => "one_step_tracking",
            BoundKind::UnrolledTracking => "unrolled_tracking",
            BoundKind::CumulativeTracking => "cumulative_tracking",
            BoundKind::AsymptoticTracking => "asymptotic_tracking",
            BoundKind::RegretStronglyConvex => "regret_strongly_convex",
            BoundKind::RegretConvex => "regret_convex",
        }
    }
}

/// Measured left-hand side and bound right-hand side for `k = k_start..`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSeries<T> {
    pub kind: BoundKind,
    pub applicable: bool,
    /// Set when the right-hand side uses a sample-estimated constant.
    pub approximate: bool,
    pub notes: Vec<String>,
    pub k_start: usize,
    pub measured: Vec<T>,
    pub rhs: Vec<T>,
    pub satisfied: Vec<bool>,
}

impl<T: Scalar> BoundSeries<T> {
    fn checked(kind: BoundKind, k_start: usize, measured: Vec<T>, rhs: Vec<T>) -> Self {
        let satisfied = measured
            .iter()
            .zip(&rhs)
            .map(|(&m, &r)| bound_holds(m, r))
            .collect();
        Self {
            kind,
            applicable: true,
            approximate: false,
            notes: Vec::new(),
            k_start,
            measured,
            rhs,
            satisfied,
        }
    }

    fn not_applicable(kind: BoundKind, reason: String) -> Self {
        Self {
            kind,
            applicable: false,
            approximate: false,
            notes: vec![reason],
            k_start: 1,
            measured: Vec::new(),
            rhs: Vec::new(),
            satisfied: Vec::new(),
        }
    }

    pub fn all_satisfied(&self) -> bool {
        self.satisfied.iter().all(|&s| s)
    }

    /// Time indices at which the bound fails.
    pub fn violations(&self) -> Vec<usize> {
        self.satisfied
            .iter()
            .enumerate()
            .filter(|(_, &s)| !s)
            .map(|(i, _)| self.k_start + i)
            .collect()
    }

    pub fn summary(&self) -> BoundSummary {
        let worst = self
            .measured
            .iter()
            .zip(&self.rhs)
            .map(|(&m, &r)| (m - r).as_f64())
            .fold(f64::NEG_INFINITY, f64::max);
        BoundSummary {
            name: self.kind.name().to_owned(),
            k_range: (self.k_start, self.k_start + self.measured.len().saturating_sub(1)),
            applicable: self.applicable,
            approximate: self.approximate,
            checked: self.satisfied.len(),
            violations: self.satisfied.iter().filter(|&&s| !s).count(),
            max_excess: if worst.is_finite() { Some(worst) } else { None },
            notes: self.notes.clone(),
        }
    }
}

/// One report node per bound and `k`-range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundSummary {
    pub name: String,
    pub k_range: (usize, usize),
    pub applicable: bool,
    pub approximate: bool,
    pub checked: usize,
    pub violations: usize,
    /// `max_k (measured − rhs)`; negative values are slack.
    pub max_excess: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport<T> {
    pub bounds: Vec<BoundSeries<T>>,
}

impl<T: Scalar> BoundReport<T> {
    pub fn get(&self, kind: BoundKind) -> Option<&BoundSeries<T>> {
        self.bounds.iter().find(|b| b.kind == kind)
    }

    pub fn merge(mut self, other: BoundReport<T>) -> Self {
        self.bounds.extend(other.bounds);
        self
    }

    pub fn summary(&self) -> Vec<BoundSummary> {
        self.bounds.iter().map(BoundSeries::summary).collect()
    }

    /// True when every applicable bound holds at every checked index.
    pub fn all_satisfied(&self) -> bool {
        self.bounds.iter().all(BoundSeries::all_satisfied)
    }
}

/// Uniform error and drift levels `γ_e ≥ ‖e_k‖`, `γ_ε ≥ ε_k`, `σ ≥ σ_k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriftLevels<T> {
    pub gamma_e: T,
    pub gamma_eps: T,
    pub sigma: T,
}

impl<T: Scalar> DriftLevels<T> {
    /// Maxima observed over the run.
    pub fn measured(trace: &RunTrace<T>, path: &OptimaPath<T>) -> Self {
        let max = |it: &mut dyn Iterator<Item = T>| it.fold(T::zero(), |m, v| m.max(v));
        Self {
            gamma_e: max(&mut trace.records.iter().map(|r| r.error_norm)),
            gamma_eps: max(&mut trace.records.iter().map(|r| r.eps)),
            sigma: path.max_sigma(),
        }
    }
}

/// Unrolled tracking bound for `k = 1..K`:
/// `β_k e_0 + Σ_i η_{k,i} σ_i + Σ_i ν_{k,i} (α‖e_i‖ + ε_i)` with
/// `β_k = Π_{i≤k} ρ_i`, `η_{k,i} = Π_{ℓ=i}^{k} ρ_ℓ`, `ν_{k,i} = Π_{ℓ=i+1}^{k} ρ_ℓ`.
///
/// Slices are indexed by step (`rho[i − 1]` is `ρ_i`, likewise the rest).
pub fn unrolled_rhs<T: Scalar>(
    rho: &[T],
    initial: T,
    sigma: &[T],
    grad_err: &[T],
    eps: &[T],
    alpha: T,
) -> Vec<T> {
    let k_max = rho.len();
    let mut out = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut total = T::zero();
        // nu = Π_{ℓ=i+1}^{k} ρ_ℓ, built from i = k downward.
        let mut nu = T::one();
        for i in (1..=k).rev() {
            let eta = nu * rho[i - 1];
            total += eta * sigma[i - 1] + nu * (alpha * grad_err[i - 1] + eps[i - 1]);
            nu = eta;
        }
        // After the loop nu = Π_{ℓ=1}^{k} ρ_ℓ = β_k.
        out.push(nu * initial + total);
    }
    out
}

pub fn evaluate_tracking_bounds<T: Scalar>(
    trace: &RunTrace<T>,
    path: &OptimaPath<T>,
    constants: &ProblemConstants<T>,
    levels: Option<DriftLevels<T>>,
) -> Result<BoundReport<T>> {
    let ts = tracking_series(trace, path)?;
    let k_max = trace.len();
    if constants.per_stage_rho.len() < k_max {
        return Err(Error::Data("constants cover fewer stages than the trace".into()));
    }
    let alpha = constants.step_size;
    let rho_k = &constants.per_stage_rho[..k_max];
    let sigma = &path.sigma[1..];
    let grad_err: Vec<T> = trace.records.iter().map(|r| r.error_norm).collect();
    let eps: Vec<T> = trace.records.iter().map(|r| r.eps).collect();
    let mut bounds = Vec::new();

    let mut prev = ts.initial;
    let one_step: Vec<T> = (0..k_max)
        .map(|i| {
            let rhs = rho_k[i] * prev + rho_k[i] * sigma[i] + alpha * grad_err[i] + eps[i];
            prev = ts.error[i];
            rhs
        })
        .collect();
    let mut s = BoundSeries::checked(BoundKind::OneStepTracking, 1, ts.error.clone(), one_step);
    if !constants.contractive {
        s.notes.push("rho >= 1: the bound holds but does not contract".into());
    }
    bounds.push(s);

    let unrolled = unrolled_rhs(rho_k, ts.initial, sigma, &grad_err, &eps, alpha);
    bounds.push(BoundSeries::checked(BoundKind::UnrolledTracking, 1, ts.error.clone(), unrolled));

    let contractive_reason = if !(constants.strong_convexity > T::zero()) {
        Some("needs strong convexity (mu > 0)".to_owned())
    } else if !constants.contractive {
        Some(format!("needs rho < 1 (alpha < 2/L); rho = {}", constants.rho))
    } else {
        None
    };
    match &contractive_reason {
        Some(why) => {
            bounds.push(BoundSeries::not_applicable(BoundKind::CumulativeTracking, why.clone()));
            bounds.push(BoundSeries::not_applicable(BoundKind::AsymptoticTracking, why.clone()));
        }
        None => {
            let rho = constants.rho;
            let denom = T::one() - rho;
            let agg = super::metrics::error_aggregates(trace);
            let mut sum = T::zero();
            let measured: Vec<T> = ts.error.iter().map(|&e| {
                sum += e;
                sum
            }).collect();
            let rhs: Vec<T> = (1..=k_max)
                .map(|k| {
                    (rho * ts.initial + rho * path.path_length[k] + agg.prox[k] + alpha * agg.gradient[k])
                        / denom
                })
                .collect();
            bounds.push(BoundSeries::checked(BoundKind::CumulativeTracking, 1, measured, rhs));

            let lv = levels.unwrap_or_else(|| DriftLevels::measured(trace, path));
            let level = (alpha * lv.gamma_e + lv.gamma_eps + rho * lv.sigma) / denom;
            let k_start = k_max.div_ceil(2).max(1);
            let measured = ts.error[k_start - 1..].to_vec();
            let rhs = vec![level; measured.len()];
            let mut s = BoundSeries::checked(BoundKind::AsymptoticTracking, k_start, measured, rhs);
            if levels.is_none() {
                s.notes.push("levels are the run's observed maxima".into());
            }
            bounds.push(s);
        }
    }
    Ok(BoundReport { bounds })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RegretOptions {
    /// Replace every measured distance `‖x_i − x_i^*‖` in the convex bound by `R`.
    pub use_diameter: bool,
}

/// Convex-case regret bound for `k = 1..K`:
/// `(1/2α) e_0² + (1/2α) Σ̄_k + (1/2α) P̄_k + Σ_{i≤k} σ_i (e_{i−1}/α + βR)
///  + k β R² + (1/α) Σ_{i≤k} (ε_i + α‖e_i‖) e_i`,
/// with `β = 1/α − inf L_k` and `e_i` optionally replaced by `R`.
#[allow(clippy::too_many_arguments)]
pub fn convex_regret_rhs<T: Scalar>(
    alpha: T,
    beta: T,
    diameter: T,
    initial: T,
    tracking: &[T],
    sigma: &[T],
    eps: &[T],
    grad_err: &[T],
    use_diameter: bool,
) -> Vec<T> {
    let two_alpha = alpha + alpha;
    let dist = |e: T| if use_diameter { diameter } else { e };
    let e0 = dist(initial);
    let mut sigma_sq = T::zero();
    let mut eps_sq = T::zero();
    let mut drift = T::zero();
    let mut cross = T::zero();
    let mut prev = e0;
    let mut out = Vec::with_capacity(tracking.len());
    for i in 0..tracking.len() {
        let e = dist(tracking[i]);
        sigma_sq += sigma[i] * sigma[i];
        eps_sq += eps[i] * eps[i];
        drift += sigma[i] * (prev / alpha + beta * diameter);
        cross += (eps[i] + alpha * grad_err[i]) * e / alpha;
        prev = e;
        let k = T::from_count(i + 1);
        out.push(
            e0 * e0 / two_alpha
                + sigma_sq / two_alpha
                + eps_sq / two_alpha
                + drift
                + k * beta * diameter * diameter
                + cross,
        );
    }
    out
}

/// `regret[k − 1]` must hold the measured `Reg_k`.
pub fn evaluate_regret_bounds<T: Scalar>(
    trace: &RunTrace<T>,
    path: &OptimaPath<T>,
    constants: &ProblemConstants<T>,
    aggregates: &ErrorAggregates<T>,
    regret: &[T],
    options: RegretOptions,
) -> Result<BoundReport<T>> {
    let ts = tracking_series(trace, path)?;
    let k_max = trace.len();
    if regret.len() != k_max {
        return Err(Error::Data(format!(
            "regret series has {} entries for {} steps",
            regret.len(),
            k_max
        )));
    }
    let alpha = constants.step_size;
    let mut bounds = Vec::new();

    let sc = match &constants.subgradient_bound {
        _ if !(constants.strong_convexity > T::zero()) => {
            Err("needs strong convexity (mu > 0)".to_owned())
        }
        _ if !constants.contractive => Err(format!("needs rho < 1; rho = {}", constants.rho)),
        None => Err("needs a subgradient bound D".to_owned()),
        Some(d) => Ok(d),
    };
    match sc {
        Err(why) => bounds.push(BoundSeries::not_applicable(BoundKind::RegretStronglyConvex, why)),
        Ok(d) => {
            let rho = constants.rho;
            let rhs = (1..=k_max)
                .map(|k| {
                    d.value / (T::one() - rho)
                        * (rho * ts.initial
                            + rho * path.path_length[k]
                            + aggregates.prox[k]
                            + alpha * aggregates.gradient[k])
                })
                .collect();
            let mut s = BoundSeries::checked(BoundKind::RegretStronglyConvex, 1, regret.to_vec(), rhs);
            s.approximate = d.sample_based;
            if d.sample_based {
                s.notes.push(format!("D estimated from {} sample points", d.samples));
            }
            bounds.push(s);
        }
    }

    let step_cap = T::one() / constants.lipschitz;
    let convex = match constants.diameter {
        None => Err("needs compact feasible sets (diameter R)".to_owned()),
        Some(r) if !r.is_finite() => Err("needs compact feasible sets (diameter R)".to_owned()),
        Some(_) if alpha > step_cap * (T::one() + T::lit(1e-12)) => {
            Err(format!("needs alpha <= 1/sup L = {step_cap}"))
        }
        Some(r) => Ok(r),
    };
    match convex {
        Err(why) => bounds.push(BoundSeries::not_applicable(BoundKind::RegretConvex, why)),
        Ok(r) => {
            // The prox precision enters through the ε-subdifferential, so the
            // objective-gap certificate is the matching quantity.
            let eps: Vec<T> = trace.records.iter().map(|s| s.eps_gap).collect();
            let grad_err: Vec<T> = trace.records.iter().map(|s| s.error_norm).collect();
            let rhs = convex_regret_rhs(
                alpha,
                constants.beta,
                r,
                ts.initial,
                &ts.error,
                &path.sigma[1..],
                &eps,
                &grad_err,
                options.use_diameter,
            );
            let mut s = BoundSeries::checked(BoundKind::RegretConvex, 1, regret.to_vec(), rhs);
            if options.use_diameter {
                s.notes.push("distances replaced by the diameter R".into());
            }
            bounds.push(s);
        }
    }
    Ok(BoundReport { bounds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn explicit_unrolling_matches_recursion() {
        let rho = [0.5, 0.9, 0.7, 0.8, 0.6];
        let sigma = [0.1, 0.0, 0.3, 0.2, 0.05];
        let ge = [0.2, 0.1, 0.0, 0.4, 0.3];
        let eps = [0.01, 0.02, 0.0, 0.05, 0.1];
        let alpha = 0.4;
        let rhs = unrolled_rhs(&rho, 2.0, &sigma, &ge, &eps, alpha);
        let mut s = 2.0;
        for k in 0..5 {
            s = rho[k] * s + rho[k] * sigma[k] + alpha * ge[k] + eps[k];
            assert!(f64::abs(s - rhs[k]) < 1e-12);
        }
    }

    #[test]
    fn asymptotic_level_arithmetic() {
        // ρ = 0.9, σ = 0.7, αγ_e + γ_ε = 0.5
        let level: f64 = (0.5 + 0.9 * 0.7) / (1.0 - 0.9);
        assert!((level - 11.3).abs() < 1e-12);
    }

    #[test]
    fn tolerance_is_relative() {
        assert!(bound_holds(1.0 + 5e-10, 1.0));
        assert!(!bound_holds(1.0 + 1e-8, 1.0));
    }
}
