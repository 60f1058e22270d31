//! Proximal operators `prox_{λh}(y) = argmin_x h(x) + ‖x − y‖²/(2λ)`, their
//! ε-inexact variants and precision certificates.

pub(crate) mod blocks;
mod certify;
mod inexact;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_dim, dot, Cholesky, DenseMatrix};
use crate::problem::{clamp, groups_disjoint, project_ball, NonsmoothCost, Polytope, Regularizer, SetKind};
use crate::Scalar;
use blocks::{Block, Dual};

pub use certify::{certify_precision, Certificate};
pub use inexact::{project_inexact, prox_budgeted, prox_perturbed, ProjectionMode};

/// A point approximating a proximal map together with its precision data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProxResult<T> {
    pub point: Vec<T>,
    /// Requested precision `ε_k`.
    pub eps_target: T,
    /// `‖point − prox(y)‖`
    pub eps_certified: T,
    /// `√(2λ (Φ(point) − Φ(prox(y))))`
    pub eps_gap: T,
    /// `‖r‖` when the point was built as `prox(y) + r`.
    pub residual_norm: Option<T>,
}

impl<T: Scalar> ProxResult<T> {
    pub(crate) fn exact(point: Vec<T>) -> Self {
        Self {
            point,
            eps_target: T::zero(),
            eps_certified: T::zero(),
            eps_gap: T::zero(),
            residual_norm: None,
        }
    }
}

/// Per-step precision `ε_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EpsSchedule<T> {
    Constant(T),
    /// `ε_k` for `k = 1..`; the last entry repeats past the end.
    Sequence(Vec<T>),
}

/// `ε_k = 0` for every `k`.
impl<T: Default> Default for EpsSchedule<T> {
    fn default() -> Self {
        EpsSchedule::Constant(T::default())
    }
}

impl<T: Scalar> EpsSchedule<T> {
    pub fn at(&self, k: usize) -> T {
        match self {
            EpsSchedule::Constant(e) => *e,
            EpsSchedule::Sequence(v) => match v.get(k.saturating_sub(1)) {
                Some(&e) => e,
                None => v.last().copied().unwrap_or(T::zero()),
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = match self {
            EpsSchedule::Constant(e) => !(*e >= T::zero()),
            EpsSchedule::Sequence(v) => v.iter().any(|e| !(*e >= T::zero())),
        };
        if bad {
            return Err(Error::param("eps", "precisions must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ProxMode<T> {
    Exact,
    /// `prox(y) + r`, `‖r‖ ≤ ε_k`.
    Perturbed,
    /// Projection moved toward the interior anchor within the `ε_k` budget.
    InteriorInexact,
    /// Exact projection onto the set tightened by `margin`.
    RestrictedMargin { margin: T },
    /// Fixed number of inner dual passes.
    Budgeted { inner_budget: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProxOracleConfig<T> {
    #[serde(flatten)]
    pub mode: ProxMode<T>,
    #[serde(default)]
    pub eps: EpsSchedule<T>,
}

impl<T: Scalar> ProxOracleConfig<T> {
    pub fn exact() -> Self {
        Self {
            mode: ProxMode::Exact,
            eps: EpsSchedule::Constant(T::zero()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.eps.validate()?;
        if let ProxMode::RestrictedMargin { margin } = self.mode {
            if !(margin >= T::zero()) {
                return Err(Error::param("margin", "must be nonnegative"));
            }
        }
        Ok(())
    }
}

/// Warm-startable dual state for the iterative prox/projection solver.
#[derive(Clone, Debug)]
pub struct ProxWorkspace<T> {
    duals: Vec<Dual<T>>,
    /// Second dual slot for a reference prox computed alongside the main one.
    aux: Vec<Dual<T>>,
    pub tolerance: T,
    pub max_passes: usize,
}

impl<T: Scalar> Default for ProxWorkspace<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> ProxWorkspace<T> {
    pub fn new() -> Self {
        Self::with_tolerance(blocks::default_tolerance())
    }

    pub fn with_tolerance(tolerance: T) -> Self {
        Self {
            duals: Vec::new(),
            aux: Vec::new(),
            tolerance,
            max_passes: blocks::DEFAULT_MAX_PASSES,
        }
    }

    /// Tighter tolerance for reference points used in certificates.
    pub fn reference() -> Self {
        Self::with_tolerance(T::lit(1e-13))
    }

    pub fn reset(&mut self) {
        self.duals.clear();
        self.aux.clear();
    }

    /// Same settings, dual state swapped with the auxiliary slot.
    pub(crate) fn swap_slots(&mut self) {
        std::mem::swap(&mut self.duals, &mut self.aux);
    }
}

/// Component blocks of `λh` in a fixed order: regularizer first, then set.
pub(crate) fn decompose<T: Scalar>(h: &NonsmoothCost<T>, lambda: T) -> Vec<Block<'_, T>> {
    let mut out = Vec::new();
    match h.regularizer() {
        Regularizer::Zero => {}
        Regularizer::L1 { weight } => out.push(Block::SoftThreshold {
            threshold: lambda * *weight,
        }),
        Regularizer::Group { weight, groups } => {
            for g in groups.iter() {
                out.push(Block::GroupShrink {
                    indices: g,
                    threshold: lambda * *weight,
                });
            }
        }
    }
    if let Some(set) = h.set() {
        match set.kind() {
            SetKind::Box { lower, upper } => out.push(Block::Box { lower, upper }),
            SetKind::Ball { center, radius } => out.push(Block::Ball {
                center,
                radius: *radius,
            }),
            SetKind::Polytope(p) => out.extend(p.blocks()),
        }
    }
    out
}

pub(crate) fn block_soft_threshold<T: Scalar>(
    y: &[T],
    groups: &[Vec<usize>],
    threshold: T,
) -> Vec<T> {
    let mut x = y.to_vec();
    for g in groups {
        let nrm = g.iter().map(|&i| y[i] * y[i]).sum::<T>().sqrt();
        let scale = if nrm > threshold {
            T::one() - threshold / nrm
        } else {
            T::zero()
        };
        for &i in g {
            x[i] = y[i] * scale;
        }
    }
    x
}

fn closed_form<T: Scalar>(h: &NonsmoothCost<T>, lambda: T, y: &[T]) -> Option<Vec<T>> {
    let set = h.set().map(|s| s.kind());
    match (h.regularizer(), set) {
        (Regularizer::Zero, None) => Some(y.to_vec()),
        (Regularizer::Zero, Some(SetKind::Box { lower, upper })) => Some(clamp(y, lower, upper)),
        (Regularizer::Zero, Some(SetKind::Ball { center, radius })) => {
            Some(project_ball(y, center, *radius))
        }
        (Regularizer::L1 { weight }, None) => Some(blocks::soft_threshold(y, lambda * *weight)),
        // Separable: clamping the soft-threshold is exact coordinate-wise.
        (Regularizer::L1 { weight }, Some(SetKind::Box { lower, upper })) => Some(clamp(
            &blocks::soft_threshold(y, lambda * *weight),
            lower,
            upper,
        )),
        (Regularizer::Group { weight, groups }, None) if groups_disjoint(groups, y.len()) => {
            Some(block_soft_threshold(y, groups, lambda * *weight))
        }
        _ => None,
    }
}

/// Exact proximal map; closed forms where available, otherwise the dual
/// block-coordinate solver to tolerance 1e−10.
pub fn prox_exact<T: Scalar>(h: &NonsmoothCost<T>, lambda: T, y: &[T]) -> Result<Vec<T>> {
    prox_exact_in(h, lambda, y, &mut ProxWorkspace::new())
}

/// [`prox_exact`] reusing (and updating) the dual state in `ws`.
pub fn prox_exact_in<T: Scalar>(
    h: &NonsmoothCost<T>,
    lambda: T,
    y: &[T],
    ws: &mut ProxWorkspace<T>,
) -> Result<Vec<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::param("lambda", format!("must be positive, got {lambda}")));
    }
    if let Some(s) = h.set() {
        check_dim(y, s.dimension())?;
    }
    if let Some(x) = closed_form(h, lambda, y) {
        return Ok(x);
    }
    let blocks = decompose(h, lambda);
    let x = blocks::solve_to_tolerance(y, &blocks, &mut ws.duals, ws.max_passes, ws.tolerance)?;
    if let (Regularizer::Zero, Some(SetKind::Polytope(p))) = (h.regularizer(), h.set().map(|s| s.kind())) {
        if let Some(polished) = polish_projection(p, y, &ws.duals) {
            if crate::linalg::dist(&polished, &x) <= T::lit(1e-6) * (T::one() + crate::linalg::norm_inf(y)) {
                return Ok(polished);
            }
        }
    }
    Ok(x)
}

/// Re-solves the projection's KKT system on the active set identified by the
/// halfspace multipliers, recovering the point to machine precision. Returns
/// `None` when the active rows are dependent or the solution fails the
/// sign/feasibility checks.
fn polish_projection<T: Scalar>(p: &Polytope<T>, y: &[T], duals: &[Dual<T>]) -> Option<Vec<T>> {
    let n_eq = p.equalities().rows();
    let mut rows: Vec<&[T]> = Vec::new();
    let mut rhs: Vec<T> = Vec::new();
    for j in 0..n_eq {
        rows.push(p.equalities().row(j));
        rhs.push(p.targets()[j]);
    }
    for j in 0..p.inequalities().rows() {
        match duals.get(n_eq + j)? {
            Dual::Scalar(lam) if *lam > T::zero() => {
                rows.push(p.inequalities().row(j));
                rhs.push(p.bounds()[j]);
            }
            Dual::Scalar(_) => {}
            Dual::Vector(_) => return None,
        }
    }
    if rows.is_empty() {
        return None;
    }
    let m = rows.len();
    let mut gram = DenseMatrix::zeros(m, m);
    for a in 0..m {
        for b in 0..=a {
            let v = dot(rows[a], rows[b]);
            gram[(a, b)] = v;
            gram[(b, a)] = v;
        }
    }
    let chol = Cholesky::factor(&gram).ok()?;
    let resid: Vec<T> = rows.iter().zip(&rhs).map(|(r, &b)| dot(r, y) - b).collect();
    let mult = chol.solve(&resid);
    if mult[n_eq..].iter().any(|&l| l < T::zero()) {
        return None;
    }
    let mut x = y.to_vec();
    for (r, &l) in rows.iter().zip(&mult) {
        crate::linalg::axpy(-l, r, &mut x);
    }
    let tol = T::lit(1e-12) * (T::one() + crate::linalg::norm_inf(y));
    (p.min_slack(&x) >= -tol && p.equality_residual(&x) <= tol).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::FeasibleSet;

    #[test]
    fn soft_threshold_example() {
        let h = NonsmoothCost::l1(1.0).unwrap();
        assert_eq!(prox_exact(&h, 1.0, &[2.0, -0.5]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn box_clamp_example() {
        let h = NonsmoothCost::indicator(FeasibleSet::cube(2, 0.0, 1.0).unwrap());
        assert_eq!(prox_exact(&h, 1.0, &[1.5, -0.2]).unwrap(), vec![1.0, 0.0]);
    }

    #[test]
    fn group_shrink_example() {
        // Block norms 3 and 0.5 with λw = 1.
        let h = NonsmoothCost::group(1.0, vec![vec![0, 1], vec![2, 3]]).unwrap();
        let y = [1.8, 2.4, 0.3, 0.4];
        let x = prox_exact(&h, 1.0, &y).unwrap();
        let want = [1.2, 1.6, 0.0, 0.0];
        for (a, b) in x.iter().zip(want) {
            assert!(f64::abs(a - b) < 1e-15);
        }
    }

    #[test]
    fn overlapping_groups_use_iterative_solver() {
        let h = NonsmoothCost::group(0.5, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let y = [1.0, 2.0, -1.0];
        let x = prox_exact(&h, 1.0, &y).unwrap();
        // Optimality: y − x ∈ λ ∂h(x), with the subgradient split across groups
        // recovered from the two-group stationarity conditions.
        let g1 = f64::sqrt(x[0] * x[0] + x[1] * x[1]);
        let g2 = f64::sqrt(x[1] * x[1] + x[2] * x[2]);
        let r = [y[0] - x[0], y[1] - x[1], y[2] - x[2]];
        assert!(f64::abs(r[0] - 0.5 * x[0] / g1) < 1e-8);
        assert!(f64::abs(r[2] - 0.5 * x[2] / g2) < 1e-8);
        assert!(f64::abs(r[1] - 0.5 * (x[1] / g1 + x[1] / g2)) < 1e-8);
    }

    #[test]
    fn rejects_nonpositive_lambda() {
        let h = NonsmoothCost::<f64>::zero();
        assert!(prox_exact(&h, 0.0, &[1.0]).is_err());
    }

    #[test]
    fn eps_sequence_repeats_last_entry() {
        let s = EpsSchedule::Sequence(vec![0.3, 0.2, 0.1]);
        assert_eq!(s.at(1), 0.3);
        assert_eq!(s.at(3), 0.1);
        assert_eq!(s.at(7), 0.1);
    }
}
