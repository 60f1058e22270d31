//! Dual block-coordinate solver for `argmin_x Σ_j h_j(x) + ½‖x − y‖²`.
//!
//! Each block keeps a dual variable `v_j`; a pass visits every block with
//! `r = x + v_j`, `x ← prox_{h_j}(r)`, `v_j ← r − x`. For indicator blocks this
//! is Dykstra's method (Hildreth's for halfspaces) and converges to the exact
//! projection onto the intersection, unlike plain alternating projections.

use crate::error::{Error, Result};
use crate::linalg::{self, dot};
use crate::Scalar;

pub(crate) const DEFAULT_MAX_PASSES: usize = 10_000;

pub(crate) fn default_tolerance<T: Scalar>() -> T {
    T::lit(1e-10)
}

#[derive(Clone, Debug)]
pub(crate) enum Block<'a, T> {
    Halfspace {
        normal: &'a [T],
        norm_sq: T,
        bound: T,
    },
    Hyperplane {
        normal: &'a [T],
        norm_sq: T,
        target: T,
    },
    Box {
        lower: &'a [T],
        upper: &'a [T],
    },
    Ball {
        center: &'a [T],
        radius: T,
    },
    SoftThreshold {
        threshold: T,
    },
    GroupShrink {
        indices: &'a [usize],
        threshold: T,
    },
}

/// Dual variable of one block: a multiplier on the normal for (half)planes,
/// a full vector otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum Dual<T> {
    Scalar(T),
    Vector(Vec<T>),
}

impl<T: Scalar> Block<'_, T> {
    fn zero_dual(&self, n: usize) -> Dual<T> {
        match self {
            Block::Halfspace { .. } | Block::Hyperplane { .. } => Dual::Scalar(T::zero()),
            _ => Dual::Vector(vec![T::zero(); n]),
        }
    }

    fn dual_matches(&self, d: &Dual<T>, n: usize) -> bool {
        match (self, d) {
            (Block::Halfspace { .. } | Block::Hyperplane { .. }, Dual::Scalar(_)) => true,
            (Block::Halfspace { .. } | Block::Hyperplane { .. }, Dual::Vector(_)) => false,
            (_, Dual::Vector(v)) => v.len() == n,
            _ => false,
        }
    }

    /// Applies one block update in place; returns the ∞-norm of the change in `x`.
    fn update(&self, x: &mut [T], dual: &mut Dual<T>) -> T {
        match (self, dual) {
            (
                Block::Halfspace {
                    normal,
                    norm_sq,
                    bound,
                },
                Dual::Scalar(lam),
            ) => {
                let ax = dot(normal, x);
                let next = (*lam + (ax - *bound) / *norm_sq).max(T::zero());
                let delta = *lam - next;
                *lam = next;
                shift_along(x, normal, delta)
            }
            (
                Block::Hyperplane {
                    normal,
                    norm_sq,
                    target,
                },
                Dual::Scalar(lam),
            ) => {
                let delta = -(dot(normal, x) - *target) / *norm_sq;
                *lam -= delta;
                shift_along(x, normal, delta)
            }
            (Block::GroupShrink { indices, threshold }, Dual::Vector(v)) => {
                let r_norm = indices
                    .iter()
                    .map(|&i| {
                        let r = x[i] + v[i];
                        r * r
                    })
                    .sum::<T>()
                    .sqrt();
                let scale = if r_norm > *threshold {
                    T::one() - *threshold / r_norm
                } else {
                    T::zero()
                };
                let mut change = T::zero();
                for &i in indices.iter() {
                    let r = x[i] + v[i];
                    let p = r * scale;
                    change = change.max((p - x[i]).abs());
                    v[i] = r - p;
                    x[i] = p;
                }
                change
            }
            (block, Dual::Vector(v)) => {
                let r: Vec<T> = x.iter().zip(v.iter()).map(|(&a, &b)| a + b).collect();
                let p = match block {
                    Block::Box { lower, upper } => crate::problem::clamp(&r, lower, upper),
                    Block::Ball { center, radius } => {
                        crate::problem::project_ball(&r, center, *radius)
                    }
                    Block::SoftThreshold { threshold } => soft_threshold(&r, *threshold),
                    _ => unreachable!("scalar-dual blocks handled above"),
                };
                let mut change = T::zero();
                for i in 0..x.len() {
                    change = change.max((p[i] - x[i]).abs());
                    v[i] = r[i] - p[i];
                    x[i] = p[i];
                }
                change
            }
            _ => unreachable!("dual layout checked before the sweep"),
        }
    }
}

fn shift_along<T: Scalar>(x: &mut [T], normal: &[T], delta: T) -> T {
    if delta == T::zero() {
        return T::zero();
    }
    let mut change = T::zero();
    for (xi, &a) in x.iter_mut().zip(normal) {
        let step = delta * a;
        *xi += step;
        change = change.max(step.abs());
    }
    change
}

pub(crate) fn soft_threshold<T: Scalar>(y: &[T], threshold: T) -> Vec<T> {
    y.iter()
        .map(|&v| v.signum() * (v.abs() - threshold).max(T::zero()))
        .collect()
}

#[derive(Clone, Debug)]
pub(crate) struct Sweep<T> {
    pub point: Vec<T>,
    pub passes: usize,
    pub last_change: T,
    pub converged: bool,
}

/// Runs up to `max_passes` sweeps from the given duals (reset to zero when
/// their layout does not match `blocks`), stopping once a full pass moves
/// `x` by at most `tol` in the ∞-norm.
pub(crate) fn sweep<T: Scalar>(
    y: &[T],
    blocks: &[Block<'_, T>],
    duals: &mut Vec<Dual<T>>,
    max_passes: usize,
    tol: T,
) -> Sweep<T> {
    let n = y.len();
    let layout_ok = duals.len() == blocks.len()
        && blocks.iter().zip(duals.iter()).all(|(b, d)| b.dual_matches(d, n));
    if !layout_ok {
        *duals = blocks.iter().map(|b| b.zero_dual(n)).collect();
    }
    // x = y − Σ_j v_j
    let mut x = y.to_vec();
    for (b, d) in blocks.iter().zip(duals.iter()) {
        match (b, d) {
            (
                Block::Halfspace { normal, .. } | Block::Hyperplane { normal, .. },
                Dual::Scalar(lam),
            ) => linalg::axpy(-*lam, normal, &mut x),
            (_, Dual::Vector(v)) => linalg::axpy(-T::one(), v, &mut x),
            _ => unreachable!(),
        }
    }
    let mut last_change = T::infinity();
    let mut passes = 0;
    while passes < max_passes {
        let mut change = T::zero();
        for (b, d) in blocks.iter().zip(duals.iter_mut()) {
            change = change.max(b.update(&mut x, d));
        }
        passes += 1;
        last_change = change;
        if change <= tol {
            return Sweep {
                point: x,
                passes,
                last_change,
                converged: true,
            };
        }
    }
    Sweep {
        point: x,
        passes,
        last_change,
        converged: blocks.is_empty(),
    }
}

/// Like [`sweep`] but fails with a convergence error at the pass cap.
pub(crate) fn solve_to_tolerance<T: Scalar>(
    y: &[T],
    blocks: &[Block<'_, T>],
    duals: &mut Vec<Dual<T>>,
    max_passes: usize,
    tol: T,
) -> Result<Vec<T>> {
    let floor = T::lit(64.0) * T::epsilon() * (T::one() + linalg::norm_inf(y));
    let out = sweep(y, blocks, duals, max_passes, tol.max(floor));
    if out.converged {
        Ok(out.point)
    } else {
        Err(Error::NoConvergence {
            method: "dual block-coordinate",
            iterations: out.passes,
            residual: out.last_change.as_f64(),
        })
    }
}
