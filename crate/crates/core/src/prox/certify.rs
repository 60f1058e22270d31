use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{self, dot};
use crate::problem::NonsmoothCost;
use crate::Scalar;

use super::{prox_exact_in, ProxWorkspace};

/// Precision of a candidate prox point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate<T> {
    /// `‖x − prox(y)‖`
    pub eps_certified: T,
    /// `√(2λ max(0, Φ(x) − Φ(prox(y))))`, `+∞` for infeasible `x`.
    pub eps_gap: T,
    /// `eps_certified ≤ eps_gap + 1e−8`
    pub consistent: bool,
    pub feasible: bool,
}

pub(crate) const CONSISTENCY_SLACK: f64 = 1e-8;

/// Certifies `x` as an approximation of `prox_{λh}(y)`.
pub fn certify_precision<T: Scalar>(
    h: &NonsmoothCost<T>,
    lambda: T,
    y: &[T],
    x: &[T],
) -> Result<Certificate<T>> {
    let p = prox_exact_in(h, lambda, y, &mut ProxWorkspace::reference())?;
    Ok(certificate_against(h, lambda, y, x, &p))
}

/// Certificate of `x` given an already computed exact prox `p`.
pub(crate) fn certificate_against<T: Scalar>(
    h: &NonsmoothCost<T>,
    lambda: T,
    y: &[T],
    x: &[T],
    p: &[T],
) -> Certificate<T> {
    let eps_certified = linalg::dist(x, p);
    let feasible = h.set().is_none_or(|s| s.contains(x));
    let eps_gap = if feasible {
        // Φ(x) − Φ(p) = h′(x) − h′(p) + ⟨x − p, (x − p) + 2(p − y)⟩ / (2λ),
        // which avoids cancelling two large squared distances.
        let d = linalg::sub(x, p);
        let py = linalg::sub(p, y);
        let quad = dot(&d, &d) + (T::one() + T::one()) * dot(&d, &py);
        let reg = h.regularizer().value(x) - h.regularizer().value(p);
        let gap = reg + quad / (lambda + lambda);
        ((lambda + lambda) * gap.max(T::zero())).sqrt()
    } else {
        T::infinity()
    };
    Certificate {
        eps_certified,
        eps_gap,
        consistent: eps_certified <= eps_gap + T::lit(CONSISTENCY_SLACK),
        feasible,
    }
}
