use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::oracle::sample_unit_sphere;
use crate::problem::{Family, FeasibleSet, NonsmoothCost};
use crate::Scalar;

use super::blocks;
use super::decompose;
use super::certify::certificate_against;
use super::{prox_exact_in, ProxMode, ProxOracleConfig, ProxResult, ProxWorkspace};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ProjectionMode<T> {
    InteriorInexact,
    RestrictedMargin { margin: T },
}

fn check_eps<T: Scalar>(eps: T) -> Result<()> {
    if eps >= T::zero() {
        Ok(())
    } else {
        Err(Error::param("eps", format!("must be nonnegative, got {eps}")))
    }
}

/// `prox(y) + r` with `‖r‖ ≤ ε`. With an indicator the perturbation points
/// from the exact prox toward the set's anchor, so the result stays feasible.
pub fn prox_perturbed<T: Scalar, R: Rng + ?Sized>(
    h: &NonsmoothCost<T>,
    lambda: T,
    y: &[T],
    eps: T,
    rng: &mut R,
) -> Result<ProxResult<T>> {
    prox_perturbed_in(h, lambda, y, eps, rng, &mut ProxWorkspace::new())
}

pub(crate) fn prox_perturbed_in<T: Scalar, R: Rng + ?Sized>(
    h: &NonsmoothCost<T>,
    lambda: T,
    y: &[T],
    eps: T,
    rng: &mut R,
    ws: &mut ProxWorkspace<T>,
) -> Result<ProxResult<T>> {
    check_eps(eps)?;
    let p = prox_exact_in(h, lambda, y, ws)?;
    let x = match h.set() {
        Some(set) => {
            let to_anchor = linalg::sub(set.anchor(), &p);
            let d = linalg::norm(&to_anchor);
            if d > T::zero() {
                let mut x = p.clone();
                linalg::axpy(eps.min(d) / d, &to_anchor, &mut x);
                x
            } else {
                p.clone()
            }
        }
        None if eps > T::zero() => {
            let u: Vec<T> = sample_unit_sphere(y.len(), rng);
            let mut x = p.clone();
            linalg::axpy(eps, &u, &mut x);
            x
        }
        None => p.clone(),
    };
    let cert = certificate_against(h, lambda, y, &x, &p);
    Ok(ProxResult {
        eps_target: eps,
        eps_certified: cert.eps_certified,
        eps_gap: cert.eps_gap,
        residual_norm: Some(cert.eps_certified),
        point: x,
    })
}

/// Inexact projection onto `set`.
///
/// Interior mode returns a feasible `x` with `‖x − y‖² ≤ d(y, X)² + ε²`;
/// restricted mode projects exactly onto the set tightened by `margin` and
/// certifies the distance to the true projection after the fact.
pub fn project_inexact<T: Scalar>(
    set: &FeasibleSet<T>,
    y: &[T],
    eps: T,
    mode: ProjectionMode<T>,
) -> Result<ProxResult<T>> {
    let h = NonsmoothCost::indicator(set.clone());
    let mut ws = ProxWorkspace::new();
    match mode {
        ProjectionMode::InteriorInexact => interior_inexact_in(&h, T::one(), y, eps, &mut ws),
        ProjectionMode::RestrictedMargin { margin } => {
            restricted_in(&h, T::one(), y, margin, &mut ws)
        }
    }
}

/// Moves from the exact prox toward the anchor by the largest step (at most
/// `ε`) whose objective-gap certificate stays within `ε`; for an indicator
/// this is the projection inequality `‖x − y‖² ≤ d(y, X)² + ε²`.
pub(crate) fn interior_inexact_in<T: Scalar>(
    h: &NonsmoothCost<T>,
    lambda: T,
    y: &[T],
    eps: T,
    ws: &mut ProxWorkspace<T>,
) -> Result<ProxResult<T>> {
    check_eps(eps)?;
    let set = h
        .set()
        .ok_or_else(|| Error::Unsupported("interior-inexact prox needs a feasible set".into()))?;
    let p = prox_exact_in(h, lambda, y, ws)?;
    let d = linalg::dist(&p, y);
    let to_anchor = linalg::sub(set.anchor(), &p);
    let span = linalg::norm(&to_anchor);
    let mut x = p.clone();
    if d > T::zero() && span > T::zero() && eps > T::zero() {
        // Largest step with (d + t)² ≤ d² + ε², which bounds the
        // projection inequality for any direction.
        let four = T::lit(4.0);
        let mut t = (eps * eps / (four * d)).min(eps).min(span);
        for _ in 0..64 {
            let cand = linalg::lerp(&p, set.anchor(), t / span);
            let cert = certificate_against(h, lambda, y, &cand, &p);
            if cert.feasible && cert.eps_gap <= eps && cert.eps_certified <= eps {
                x = cand;
                break;
            }
            t *= T::lit(0.5);
        }
    }
    let cert = certificate_against(h, lambda, y, &x, &p);
    assert!(
        cert.eps_gap <= eps || x == p,
        "interior step produced a gap certificate above the budget"
    );
    Ok(ProxResult {
        point: x,
        eps_target: eps,
        eps_certified: cert.eps_certified,
        eps_gap: cert.eps_gap,
        residual_norm: None,
    })
}

/// Exact prox of `h` with its set tightened by `margin`; the achieved
/// precision is also the reported target.
pub(crate) fn restricted_in<T: Scalar>(
    h: &NonsmoothCost<T>,
    lambda: T,
    y: &[T],
    margin: T,
    ws: &mut ProxWorkspace<T>,
) -> Result<ProxResult<T>> {
    let tight = h.restricted(margin)?;
    let x = prox_exact_in(&tight, lambda, y, ws)?;
    ws.swap_slots();
    let p = prox_exact_in(h, lambda, y, ws);
    ws.swap_slots();
    let p = p?;
    let cert = certificate_against(h, lambda, y, &x, &p);
    Ok(ProxResult {
        point: x,
        eps_target: cert.eps_certified,
        eps_certified: cert.eps_certified,
        eps_gap: cert.eps_gap,
        residual_norm: None,
    })
}

/// Runs exactly `inner_budget` dual passes from zero duals (stopping early
/// only at an exact fixed point), repairs feasibility by moving toward the
/// anchor, and certifies against the exact prox.
pub fn prox_budgeted<T: Scalar>(
    h: &NonsmoothCost<T>,
    lambda: T,
    y: &[T],
    inner_budget: usize,
) -> Result<ProxResult<T>> {
    prox_budgeted_in(h, lambda, y, inner_budget, &mut ProxWorkspace::new())
}

pub(crate) fn prox_budgeted_in<T: Scalar>(
    h: &NonsmoothCost<T>,
    lambda: T,
    y: &[T],
    inner_budget: usize,
    ws: &mut ProxWorkspace<T>,
) -> Result<ProxResult<T>> {
    if !(lambda > T::zero()) {
        return Err(Error::param("lambda", format!("must be positive, got {lambda}")));
    }
    match h.family() {
        Family::GroupNorm | Family::PolytopeIndicator | Family::Composite => {}
        other => {
            return Err(Error::Unsupported(format!(
                "budgeted prox is defined for group and polytope costs, not {other:?}"
            )))
        }
    }
    let blocks = decompose(h, lambda);
    let mut duals = Vec::new();
    let mut x = blocks::sweep(y, &blocks, &mut duals, inner_budget, T::zero()).point;
    if let Some(set) = h.set() {
        x = set.pull_toward_anchor(&x)?;
    }
    let p = prox_exact_in(h, lambda, y, ws)?;
    let cert = certificate_against(h, lambda, y, &x, &p);
    Ok(ProxResult {
        point: x,
        eps_target: cert.eps_certified,
        eps_certified: cert.eps_certified,
        eps_gap: cert.eps_gap,
        residual_norm: None,
    })
}

impl<T: Scalar> ProxOracleConfig<T> {
    /// Applies the configured prox oracle at time index `k`.
    pub fn apply<R: Rng + ?Sized>(
        &self,
        h: &NonsmoothCost<T>,
        lambda: T,
        y: &[T],
        k: usize,
        rng: &mut R,
        ws: &mut ProxWorkspace<T>,
    ) -> Result<ProxResult<T>> {
        let eps = self.eps.at(k);
        match &self.mode {
            ProxMode::Exact => Ok(ProxResult::exact(prox_exact_in(h, lambda, y, ws)?)),
            ProxMode::Perturbed => prox_perturbed_in(h, lambda, y, eps, rng, ws),
            ProxMode::InteriorInexact => interior_inexact_in(h, lambda, y, eps, ws),
            ProxMode::RestrictedMargin { margin } => restricted_in(h, lambda, y, *margin, ws),
            ProxMode::Budgeted { inner_budget } => {
                prox_budgeted_in(h, lambda, y, *inner_budget, ws)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prox::prox_exact;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn interior_step_on_unit_interval() {
        let set = FeasibleSet::new_box(vec![0.0], vec![1.0]).unwrap();
        let r = project_inexact(&set, &[1.5], 0.1, ProjectionMode::InteriorInexact).unwrap();
        assert!(f64::abs(r.point[0] - 0.995) < 1e-15);
        let lhs = (r.point[0] - 1.5f64).powi(2);
        assert!((lhs - 0.255025).abs() < 1e-12);
        assert!(lhs <= 0.25 + 0.01);
    }

    #[test]
    fn feasible_input_is_returned_unchanged() {
        let set = FeasibleSet::cube(3, 0.0, 1.0).unwrap();
        let y = [0.2, 0.7, 0.9];
        for mode in [ProjectionMode::InteriorInexact, ProjectionMode::RestrictedMargin { margin: 0.05 }] {
            let r = project_inexact(&set, &y, 0.3, mode).unwrap();
            assert_eq!(r.point, y.to_vec());
            assert_eq!(r.eps_certified, 0.0);
        }
    }

    #[test]
    fn perturbation_with_zero_eps_is_exact() {
        let h = NonsmoothCost::l1(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = prox_perturbed(&h, 1.0, &[2.0, -0.5], 0.0, &mut rng).unwrap();
        assert_eq!(r.point, vec![1.0, 0.0]);
        assert_eq!(r.eps_certified, 0.0);
        assert_eq!(r.eps_gap, 0.0);
    }

    #[test]
    fn perturbation_stays_within_eps() {
        let h = NonsmoothCost::l1(1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let r = prox_perturbed(&h, 1.0, &[2.0, -0.5], 0.1, &mut rng).unwrap();
        assert!(linalg::dist(&r.point, &[1.0, 0.0]) <= 0.1 + 1e-15);
        assert!(r.eps_certified <= 0.1 + 1e-15);
    }

    #[test]
    fn perturbed_box_point_stays_feasible() {
        let set = FeasibleSet::cube(4, 0.0, 1.0).unwrap();
        let h = NonsmoothCost::indicator(set.clone());
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let y = [1.5, -0.3, 0.4, 2.0];
        let r = prox_perturbed(&h, 1.0, &y, 0.2, &mut rng).unwrap();
        assert!(set.contains(&r.point));
        let p = prox_exact(&h, 1.0, &y).unwrap();
        assert!(linalg::dist(&r.point, &p) <= 0.2 + 1e-12);
    }

    #[test]
    fn zero_budget_returns_repaired_input() {
        let h = NonsmoothCost::group(0.5, vec![vec![0, 1], vec![2]]).unwrap();
        let y = [1.0, -2.0, 0.3];
        let r = prox_budgeted(&h, 1.0, &y, 0).unwrap();
        assert_eq!(r.point, y.to_vec());
        let p = prox_exact(&h, 1.0, &y).unwrap();
        assert!(f64::abs(r.eps_certified - linalg::dist(&y, &p)) < 1e-15);
    }

    #[test]
    fn budget_on_unsupported_family_is_rejected() {
        let h = NonsmoothCost::l1(1.0).unwrap();
        assert!(matches!(
            prox_budgeted(&h, 1.0, &[1.0], 3),
            Err(Error::Unsupported(_))
        ));
    }
}
