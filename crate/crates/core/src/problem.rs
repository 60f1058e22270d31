//! Time-varying composite problems `f_k = g_k + h_k` and their curvature data.
//!
//! Every smooth family declares its Lipschitz constant `L_k` and strong
//! convexity modulus `μ_k` analytically; nothing here estimates them.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, check_dim, dot, norm, Cholesky, DenseMatrix};
use crate::prox::blocks::Block;
use crate::Scalar;

/// Absolute feasibility tolerance used by indicator evaluation.
pub fn feasibility_tol<T: Scalar>() -> T {
    T::lit(1e-9).max(T::epsilon() * T::lit(1e3))
}

/// Value and gradient access for a differentiable cost.
pub trait SmoothFunction<T: Scalar> {
    fn dimension(&self) -> usize;
    fn value(&self, x: &[T]) -> Result<T>;
    fn gradient(&self, x: &[T]) -> Result<Vec<T>>;
}

/// Network utility `-Σ_s κ_s log(1 + t_s·x_s) + (ν/2)‖x‖²`.
///
/// The variable stacks one block of link rates per flow (`x_s`, flow-major);
/// `t_s` is the routing-matrix row of the flow's source node, so `t_s·x_s` is
/// the rate injected by that source.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NetworkUtility<T> {
    pub links: usize,
    pub source_rows: Arc<Vec<Vec<T>>>,
    pub kappa: Vec<T>,
    pub nu: T,
}

impl<T: Scalar> NetworkUtility<T> {
    fn injected(&self, x: &[T], s: usize) -> T {
        dot(&self.source_rows[s], &x[s * self.links..(s + 1) * self.links])
    }

    fn checked_log_arg(&self, x: &[T], s: usize) -> Result<T> {
        let arg = T::one() + self.injected(x, s);
        if arg > T::zero() && arg.is_finite() {
            Ok(arg)
        } else {
            Err(Error::Domain {
                index: s,
                reason: format!("log argument 1 + t·x = {arg} is not positive for flow {s}"),
            })
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SmoothKind<T> {
    /// `½ Σ q_i (x_i − b_i)²`
    DiagonalQuadratic { weights: Vec<T>, center: Vec<T> },
    /// `½ ‖A x − b‖²`
    LeastSquares {
        matrix: Arc<DenseMatrix<T>>,
        target: Vec<T>,
    },
    NetworkUtility(NetworkUtility<T>),
}

/// Smooth part `g_k` with its declared curvature constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SmoothCost<T> {
    kind: SmoothKind<T>,
    lipschitz: T,
    strong_convexity: T,
}

impl<T: Scalar> SmoothCost<T> {
    fn checked(kind: SmoothKind<T>, lipschitz: T, strong_convexity: T) -> Result<Self> {
        if !(lipschitz > T::zero()) || !lipschitz.is_finite() {
            return Err(Error::param("lipschitz", format!("must be positive, got {lipschitz}")));
        }
        if !(strong_convexity >= T::zero()) || strong_convexity > lipschitz {
            return Err(Error::param(
                "strong_convexity",
                format!("need 0 <= mu <= L, got mu={strong_convexity}, L={lipschitz}"),
            ));
        }
        Ok(Self {
            kind,
            lipschitz,
            strong_convexity,
        })
    }

    pub fn diagonal_quadratic(weights: Vec<T>, center: Vec<T>) -> Result<Self> {
        check_dim(&center, weights.len())?;
        if weights.is_empty() || weights.iter().any(|&w| !(w >= T::zero())) {
            return Err(Error::param("weights", "must be a nonempty nonnegative vector"));
        }
        let l = weights.iter().fold(T::zero(), |m, &w| m.max(w));
        let mu = weights.iter().fold(T::infinity(), |m, &w| m.min(w));
        Self::checked(SmoothKind::DiagonalQuadratic { weights, center }, l, mu)
    }

    /// `½‖x − b‖²`
    pub fn centered(center: Vec<T>) -> Result<Self> {
        Self::diagonal_quadratic(vec![T::one(); center.len()], center)
    }

    /// Least squares with curvature constants supplied by the caller
    /// (`L = σ_max(A)²`, `μ = σ_min(A)²` or 0 when rank deficient).
    pub fn least_squares(
        matrix: Arc<DenseMatrix<T>>,
        target: Vec<T>,
        lipschitz: T,
        strong_convexity: T,
    ) -> Result<Self> {
        check_dim(&target, matrix.rows())?;
        Self::checked(
            SmoothKind::LeastSquares { matrix, target },
            lipschitz,
            strong_convexity,
        )
    }

    /// Curvature constants are taken on the region where every injected rate
    /// is nonnegative, which the feasible sets of the network family enforce.
    pub fn network_utility(utility: NetworkUtility<T>) -> Result<Self> {
        if !(utility.nu > T::zero()) {
            return Err(Error::param("nu", "regularization must be positive"));
        }
        if utility.kappa.len() != utility.source_rows.len() {
            return Err(Error::DimensionMismatch {
                expected: utility.source_rows.len(),
                got: utility.kappa.len(),
            });
        }
        for row in utility.source_rows.iter() {
            check_dim(row, utility.links)?;
        }
        if utility.kappa.iter().any(|&k| !(k >= T::zero())) {
            return Err(Error::param("kappa", "utility weights must be nonnegative"));
        }
        let curvature = utility
            .kappa
            .iter()
            .zip(utility.source_rows.iter())
            .fold(T::zero(), |m, (&k, row)| m.max(k * linalg::norm_sq(row)));
        let nu = utility.nu;
        Self::checked(SmoothKind::NetworkUtility(utility), nu + curvature, nu)
    }

    pub fn kind(&self) -> &SmoothKind<T> {
        &self.kind
    }

    pub fn lipschitz(&self) -> T {
        self.lipschitz
    }

    pub fn strong_convexity(&self) -> T {
        self.strong_convexity
    }
}

impl<T: Scalar> SmoothFunction<T> for SmoothCost<T> {
    fn dimension(&self) -> usize {
        match &self.kind {
            SmoothKind::DiagonalQuadratic { weights, .. } => weights.len(),
            SmoothKind::LeastSquares { matrix, .. } => matrix.cols(),
            SmoothKind::NetworkUtility(u) => u.links * u.source_rows.len(),
        }
    }

    fn value(&self, x: &[T]) -> Result<T> {
        check_dim(x, self.dimension())?;
        let half = T::lit(0.5);
        Ok(match &self.kind {
            SmoothKind::DiagonalQuadratic { weights, center } => {
                half * weights
                    .iter()
                    .zip(x.iter().zip(center))
                    .map(|(&q, (&xi, &bi))| q * (xi - bi) * (xi - bi))
                    .sum::<T>()
            }
            SmoothKind::LeastSquares { matrix, target } => {
                let r = linalg::sub(&matrix.matvec(x), target);
                half * linalg::norm_sq(&r)
            }
            SmoothKind::NetworkUtility(u) => {
                let mut v = half * u.nu * linalg::norm_sq(x);
                for s in 0..u.kappa.len() {
                    v -= u.kappa[s] * u.checked_log_arg(x, s)?.ln();
                }
                v
            }
        })
    }

    fn gradient(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(x, self.dimension())?;
        Ok(match &self.kind {
            SmoothKind::DiagonalQuadratic { weights, center } => weights
                .iter()
                .zip(x.iter().zip(center))
                .map(|(&q, (&xi, &bi))| q * (xi - bi))
                .collect(),
            SmoothKind::LeastSquares { matrix, target } => {
                let r = linalg::sub(&matrix.matvec(x), target);
                matrix.matvec_t(&r)
            }
            SmoothKind::NetworkUtility(u) => {
                let mut g = linalg::scaled(x, u.nu);
                for s in 0..u.kappa.len() {
                    let arg = u.checked_log_arg(x, s)?;
                    let coef = -u.kappa[s] / arg;
                    let block = &mut g[s * u.links..(s + 1) * u.links];
                    linalg::axpy(coef, &u.source_rows[s], block);
                }
                g
            }
        })
    }
}

/// Intersection of halfspaces `A x ≤ b` and hyperplanes `E x = f`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Polytope<T> {
    inequalities: Arc<DenseMatrix<T>>,
    bounds: Vec<T>,
    equalities: Arc<DenseMatrix<T>>,
    targets: Vec<T>,
    /// How strongly each inequality is tightened by a restriction margin.
    margin_weights: Arc<Vec<T>>,
    ineq_norms_sq: Arc<Vec<T>>,
    eq_norms_sq: Arc<Vec<T>>,
}

impl<T: Scalar> Polytope<T> {
    pub fn new(
        inequalities: Arc<DenseMatrix<T>>,
        bounds: Vec<T>,
        equalities: Arc<DenseMatrix<T>>,
        targets: Vec<T>,
    ) -> Result<Self> {
        let weights = Arc::new(vec![T::one(); inequalities.rows()]);
        Self::with_margin_weights(inequalities, bounds, equalities, targets, weights)
    }

    pub fn with_margin_weights(
        inequalities: Arc<DenseMatrix<T>>,
        bounds: Vec<T>,
        equalities: Arc<DenseMatrix<T>>,
        targets: Vec<T>,
        margin_weights: Arc<Vec<T>>,
    ) -> Result<Self> {
        check_dim(&bounds, inequalities.rows())?;
        check_dim(&targets, equalities.rows())?;
        check_dim(&margin_weights, inequalities.rows())?;
        if equalities.rows() > 0 && equalities.cols() != inequalities.cols() {
            return Err(Error::DimensionMismatch {
                expected: inequalities.cols(),
                got: equalities.cols(),
            });
        }
        let norms = |m: &DenseMatrix<T>| -> Result<Vec<T>> {
            (0..m.rows())
                .map(|i| {
                    let n = linalg::norm_sq(m.row(i));
                    if n > T::zero() {
                        Ok(n)
                    } else {
                        Err(Error::param("polytope", format!("constraint row {i} is zero")))
                    }
                })
                .collect()
        };
        let ineq_norms_sq = Arc::new(norms(&inequalities)?);
        let eq_norms_sq = Arc::new(norms(&equalities)?);
        Ok(Self {
            inequalities,
            bounds,
            equalities,
            targets,
            margin_weights,
            ineq_norms_sq,
            eq_norms_sq,
        })
    }

    pub fn dimension(&self) -> usize {
        self.inequalities.cols()
    }

    pub fn inequalities(&self) -> &DenseMatrix<T> {
        &self.inequalities
    }

    pub fn bounds(&self) -> &[T] {
        &self.bounds
    }

    pub fn equalities(&self) -> &DenseMatrix<T> {
        &self.equalities
    }

    pub fn targets(&self) -> &[T] {
        &self.targets
    }

    /// Smallest inequality slack `b_j − a_j·x`.
    pub fn min_slack(&self, x: &[T]) -> T {
        (0..self.inequalities.rows()).fold(T::infinity(), |m, j| {
            m.min(self.bounds[j] - dot(self.inequalities.row(j), x))
        })
    }

    pub fn equality_residual(&self, x: &[T]) -> T {
        (0..self.equalities.rows()).fold(T::zero(), |m, j| {
            m.max((dot(self.equalities.row(j), x) - self.targets[j]).abs())
        })
    }

    pub(crate) fn blocks(&self) -> Vec<Block<'_, T>> {
        let mut out = Vec::with_capacity(self.equalities.rows() + self.inequalities.rows());
        for j in 0..self.equalities.rows() {
            out.push(Block::Hyperplane {
                normal: self.equalities.row(j),
                norm_sq: self.eq_norms_sq[j],
                target: self.targets[j],
            });
        }
        for j in 0..self.inequalities.rows() {
            out.push(Block::Halfspace {
                normal: self.inequalities.row(j),
                norm_sq: self.ineq_norms_sq[j],
                bound: self.bounds[j],
            });
        }
        out
    }

    fn shrunk(&self, margin: T) -> Self {
        let mut out = self.clone();
        for (b, &w) in out.bounds.iter_mut().zip(self.margin_weights.iter()) {
            *b -= margin * w;
        }
        out
    }

    /// Orthogonal projection onto the affine hull `E x = f`.
    pub fn project_affine(&self, x: &[T]) -> Result<Vec<T>> {
        if self.equalities.rows() == 0 {
            return Ok(x.to_vec());
        }
        let residual: Vec<T> = (0..self.equalities.rows())
            .map(|j| dot(self.equalities.row(j), x) - self.targets[j])
            .collect();
        let chol = Cholesky::factor(&self.equalities.gram_rows())?;
        let mult = chol.solve(&residual);
        Ok(linalg::sub(x, &self.equalities.matvec_t(&mult)))
    }

    /// Component of `d` in the null space of `E`.
    pub fn project_direction(&self, d: &[T]) -> Result<Vec<T>> {
        if self.equalities.rows() == 0 {
            return Ok(d.to_vec());
        }
        let ed = self.equalities.matvec(d);
        let chol = Cholesky::factor(&self.equalities.gram_rows())?;
        let mult = chol.solve(&ed);
        Ok(linalg::sub(d, &self.equalities.matvec_t(&mult)))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SetKind<T> {
    Box { lower: Vec<T>, upper: Vec<T> },
    Ball { center: Vec<T>, radius: T },
    Polytope(Polytope<T>),
}

/// Closed convex set with a strictly feasible anchor and a diameter bound.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FeasibleSet<T> {
    kind: SetKind<T>,
    anchor: Vec<T>,
    diameter: T,
}

impl<T: Scalar> FeasibleSet<T> {
    pub fn new_box(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        check_dim(&upper, lower.len())?;
        if lower.is_empty() || lower.iter().zip(&upper).any(|(&l, &u)| !(l < u)) {
            return Err(Error::param("box", "need lower < upper in every coordinate"));
        }
        let anchor = linalg::lerp(&lower, &upper, T::lit(0.5));
        let diameter = linalg::dist(&lower, &upper);
        Ok(Self {
            kind: SetKind::Box { lower, upper },
            anchor,
            diameter,
        })
    }

    /// `[lo, hi]ⁿ`
    pub fn cube(n: usize, lo: T, hi: T) -> Result<Self> {
        Self::new_box(vec![lo; n], vec![hi; n])
    }

    pub fn new_ball(center: Vec<T>, radius: T) -> Result<Self> {
        if center.is_empty() || !(radius > T::zero()) {
            return Err(Error::param("ball", "need positive radius and nonempty center"));
        }
        Ok(Self {
            anchor: center.clone(),
            diameter: radius + radius,
            kind: SetKind::Ball { center, radius },
        })
    }

    /// `diameter` is a declared upper bound on `sup ‖x − y‖` over the set.
    pub fn new_polytope(polytope: Polytope<T>, anchor: Vec<T>, diameter: T) -> Result<Self> {
        check_dim(&anchor, polytope.dimension())?;
        if !(diameter > T::zero()) {
            return Err(Error::param("diameter", "must be positive"));
        }
        let slack = polytope.min_slack(&anchor);
        if !(slack > T::zero()) {
            return Err(Error::param(
                "anchor",
                format!("must satisfy every inequality strictly (slack {slack})"),
            ));
        }
        if polytope.equality_residual(&anchor) > feasibility_tol::<T>() {
            return Err(Error::param("anchor", "violates an equality constraint"));
        }
        Ok(Self {
            kind: SetKind::Polytope(polytope),
            anchor,
            diameter,
        })
    }

    pub fn kind(&self) -> &SetKind<T> {
        &self.kind
    }

    pub fn anchor(&self) -> &[T] {
        &self.anchor
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    pub fn dimension(&self) -> usize {
        self.anchor.len()
    }

    /// Largest constraint violation (0 when feasible).
    pub fn violation(&self, x: &[T]) -> T {
        match &self.kind {
            SetKind::Box { lower, upper } => x
                .iter()
                .zip(lower.iter().zip(upper))
                .fold(T::zero(), |m, (&v, (&l, &u))| m.max(l - v).max(v - u)),
            SetKind::Ball { center, radius } => {
                (linalg::dist(x, center) - *radius).max(T::zero())
            }
            SetKind::Polytope(p) => (-p.min_slack(x)).max(p.equality_residual(x)).max(T::zero()),
        }
    }

    pub fn contains(&self, x: &[T]) -> bool {
        x.len() == self.dimension()
            && self.violation(x) <= feasibility_tol::<T>() * (T::one() + linalg::norm_inf(x))
    }

    /// Exact Euclidean projection; polytopes use the halfspace-wise dual
    /// block-coordinate (Dykstra/Hildreth) scheme.
    pub fn project(&self, y: &[T]) -> Result<Vec<T>> {
        check_dim(y, self.dimension())?;
        match &self.kind {
            SetKind::Box { lower, upper } => Ok(clamp(y, lower, upper)),
            SetKind::Ball { center, radius } => Ok(project_ball(y, center, *radius)),
            SetKind::Polytope(_) => {
                crate::prox::prox_exact(&NonsmoothCost::indicator(self.clone()), T::one(), y)
            }
        }
    }

    /// Set tightened by `margin`: box faces and ball radius move inward by
    /// `margin`, polytope bounds by `margin` times each row's margin weight.
    pub fn shrink(&self, margin: T) -> Result<Self> {
        if !(margin >= T::zero()) {
            return Err(Error::param("margin", "must be nonnegative"));
        }
        let kind = match &self.kind {
            SetKind::Box { lower, upper } => {
                let lo: Vec<T> = lower.iter().map(|&l| l + margin).collect();
                let hi: Vec<T> = upper.iter().map(|&u| u - margin).collect();
                if lo.iter().zip(&hi).any(|(&l, &u)| l > u) {
                    return Err(Error::InfeasibleRestriction(format!(
                        "box margin {margin} exceeds half the side length"
                    )));
                }
                SetKind::Box {
                    lower: lo,
                    upper: hi,
                }
            }
            SetKind::Ball { center, radius } => {
                if margin >= *radius {
                    return Err(Error::InfeasibleRestriction(format!(
                        "ball margin {margin} >= radius {radius}"
                    )));
                }
                SetKind::Ball {
                    center: center.clone(),
                    radius: *radius - margin,
                }
            }
            SetKind::Polytope(p) => {
                let shrunk = p.shrunk(margin);
                if shrunk.min_slack(&self.anchor) < T::zero() {
                    return Err(Error::InfeasibleRestriction(format!(
                        "margin {margin} removes the interior anchor from the polytope"
                    )));
                }
                SetKind::Polytope(shrunk)
            }
        };
        Ok(Self {
            kind,
            anchor: self.anchor.clone(),
            diameter: self.diameter,
        })
    }

    /// Moves an infeasible point along the segment toward the anchor until
    /// it becomes feasible; equality constraints are restored first.
    pub fn pull_toward_anchor(&self, x: &[T]) -> Result<Vec<T>> {
        check_dim(x, self.dimension())?;
        if self.contains(x) {
            return Ok(x.to_vec());
        }
        let c = &self.anchor;
        let theta = match &self.kind {
            SetKind::Box { lower, upper } => {
                let mut t = T::zero();
                for i in 0..x.len() {
                    if x[i] > upper[i] {
                        t = t.max((x[i] - upper[i]) / (x[i] - c[i]));
                    } else if x[i] < lower[i] {
                        t = t.max((lower[i] - x[i]) / (c[i] - x[i]));
                    }
                }
                t
            }
            SetKind::Ball { center, radius } => {
                let r = linalg::dist(x, center);
                T::one() - *radius / r
            }
            SetKind::Polytope(p) => {
                let xa = p.project_affine(x)?;
                let mut t = T::zero();
                let a = p.inequalities();
                for j in 0..a.rows() {
                    let ax = dot(a.row(j), &xa);
                    if ax > p.bounds[j] {
                        let ac = dot(a.row(j), c);
                        t = t.max((ax - p.bounds[j]) / (ax - ac));
                    }
                }
                let t = (t * (T::one() + T::lit(1e-9))).min(T::one());
                return Ok(linalg::lerp(&xa, c, t));
            }
        };
        let t = (theta * (T::one() + T::lit(1e-9))).min(T::one());
        Ok(linalg::lerp(x, c, t))
    }

    /// Uniform-ish random feasible points: exact for boxes and balls, random
    /// chords through the anchor for polytopes.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<T>> {
        let n = self.dimension();
        Ok(match &self.kind {
            SetKind::Box { lower, upper } => lower
                .iter()
                .zip(upper)
                .map(|(&l, &u)| l + (u - l) * T::lit(rng.random::<f64>()))
                .collect(),
            SetKind::Ball { center, radius } => {
                let u: Vec<T> = crate::oracle::sample_unit_sphere(n, rng);
                let r = *radius * T::lit(rng.random::<f64>().powf(1.0 / n as f64));
                linalg::add(center, &linalg::scaled(&u, r))
            }
            SetKind::Polytope(p) => {
                let c = &self.anchor;
                loop {
                    let u: Vec<T> = crate::oracle::sample_unit_sphere(n, rng);
                    let d = p.project_direction(&u)?;
                    if norm(&d) <= T::lit(1e-12) {
                        return Ok(c.clone());
                    }
                    let a = p.inequalities();
                    let mut t_max = T::infinity();
                    for j in 0..a.rows() {
                        let ad = dot(a.row(j), &d);
                        if ad > T::zero() {
                            t_max = t_max.min((p.bounds[j] - dot(a.row(j), c)) / ad);
                        }
                    }
                    if t_max.is_finite() {
                        let t = t_max * T::lit(rng.random::<f64>());
                        break linalg::add(c, &linalg::scaled(&d, t));
                    }
                }
            }
        })
    }

    /// Box corners (empty for other kinds or when there are more than `limit`).
    pub fn vertices(&self, limit: usize) -> Vec<Vec<T>> {
        match &self.kind {
            SetKind::Box { lower, upper } if lower.len() < 31 && (1usize << lower.len()) <= limit => {
                (0..1usize << lower.len())
                    .map(|mask| {
                        (0..lower.len())
                            .map(|i| if mask >> i & 1 == 1 { upper[i] } else { lower[i] })
                            .collect()
                    })
                    .collect()
            }
            _ => Vec::new(),
        }
    }
}

pub(crate) fn clamp<T: Scalar>(y: &[T], lower: &[T], upper: &[T]) -> Vec<T> {
    y.iter()
        .zip(lower.iter().zip(upper))
        .map(|(&v, (&l, &u))| v.max(l).min(u))
        .collect()
}

pub(crate) fn project_ball<T: Scalar>(y: &[T], center: &[T], radius: T) -> Vec<T> {
    let r = linalg::dist(y, center);
    if r <= radius {
        y.to_vec()
    } else {
        linalg::lerp(center, y, radius / r)
    }
}

/// Nonsmooth regularizer `h′`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum Regularizer<T> {
    Zero,
    /// `w ‖x‖₁`
    L1 { weight: T },
    /// `w Σ_g ‖x_g‖₂`; groups may overlap.
    Group {
        weight: T,
        groups: Arc<Vec<Vec<usize>>>,
    },
}

impl<T: Scalar> Regularizer<T> {
    pub fn value(&self, x: &[T]) -> T {
        match self {
            Regularizer::Zero => T::zero(),
            Regularizer::L1 { weight } => *weight * x.iter().map(|v| v.abs()).sum::<T>(),
            Regularizer::Group { weight, groups } => {
                *weight
                    * groups
                        .iter()
                        .map(|g| g.iter().map(|&i| x[i] * x[i]).sum::<T>().sqrt())
                        .sum::<T>()
            }
        }
    }

    /// Upper bound on the norm of any subgradient, valid everywhere.
    pub fn subgradient_bound(&self, n: usize) -> T {
        match self {
            Regularizer::Zero => T::zero(),
            Regularizer::L1 { weight } => *weight * T::from_count(n).sqrt(),
            Regularizer::Group { weight, groups } => {
                let mut cover = vec![0usize; n];
                for g in groups.iter() {
                    for &i in g {
                        cover[i] += 1;
                    }
                }
                let overlap = cover.into_iter().max().unwrap_or(0);
                *weight * T::from_count(overlap * groups.len()).sqrt()
            }
        }
    }
}

/// Groups partition-free check.
pub(crate) fn groups_disjoint(groups: &[Vec<usize>], n: usize) -> bool {
    let mut seen = vec![false; n];
    for g in groups {
        for &i in g {
            if seen[i] {
                return false;
            }
            seen[i] = true;
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Zero,
    L1Norm,
    GroupNorm,
    BoxIndicator,
    BallIndicator,
    PolytopeIndicator,
    /// Regularizer plus set indicator.
    Composite,
}

/// Nonsmooth part `h_k = h′ + δ_X`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NonsmoothCost<T> {
    regularizer: Regularizer<T>,
    set: Option<FeasibleSet<T>>,
}

impl<T: Scalar> NonsmoothCost<T> {
    pub fn zero() -> Self {
        Self {
            regularizer: Regularizer::Zero,
            set: None,
        }
    }

    pub fn l1(weight: T) -> Result<Self> {
        if !(weight >= T::zero()) {
            return Err(Error::param("weight", "must be nonnegative"));
        }
        Ok(Self {
            regularizer: Regularizer::L1 { weight },
            set: None,
        })
    }

    pub fn group(weight: T, groups: Vec<Vec<usize>>) -> Result<Self> {
        if !(weight >= T::zero()) {
            return Err(Error::param("weight", "must be nonnegative"));
        }
        if groups.is_empty() || groups.iter().any(Vec::is_empty) {
            return Err(Error::param("groups", "need at least one nonempty group"));
        }
        Ok(Self {
            regularizer: Regularizer::Group {
                weight,
                groups: Arc::new(groups),
            },
            set: None,
        })
    }

    pub fn indicator(set: FeasibleSet<T>) -> Self {
        Self {
            regularizer: Regularizer::Zero,
            set: Some(set),
        }
    }

    /// Adds a set indicator to this cost.
    pub fn with_set(mut self, set: FeasibleSet<T>) -> Self {
        self.set = Some(set);
        self
    }

    pub fn regularizer(&self) -> &Regularizer<T> {
        &self.regularizer
    }

    pub fn set(&self) -> Option<&FeasibleSet<T>> {
        self.set.as_ref()
    }

    pub fn has_indicator(&self) -> bool {
        self.set.is_some()
    }

    pub fn family(&self) -> Family {
        match (&self.regularizer, &self.set) {
            (Regularizer::Zero, None) => Family::Zero,
            (Regularizer::L1 { .. }, None) => Family::L1Norm,
            (Regularizer::Group { .. }, None) => Family::GroupNorm,
            (Regularizer::Zero, Some(s)) => match s.kind() {
                SetKind::Box { .. } => Family::BoxIndicator,
                SetKind::Ball { .. } => Family::BallIndicator,
                SetKind::Polytope(_) => Family::PolytopeIndicator,
            },
            (_, Some(_)) => Family::Composite,
        }
    }

    pub(crate) fn validate(&self, n: usize) -> Result<()> {
        if let Regularizer::Group { groups, .. } = &self.regularizer {
            if let Some(&bad) = groups.iter().flatten().find(|&&i| i >= n) {
                return Err(Error::param("groups", format!("index {bad} >= dimension {n}")));
            }
        }
        if let Some(s) = &self.set {
            if s.dimension() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: s.dimension(),
                });
            }
        }
        Ok(())
    }

    /// `h(x)`, `+∞` outside the feasible set.
    pub fn value(&self, x: &[T]) -> T {
        if let Some(s) = &self.set {
            if !s.contains(x) {
                return T::infinity();
            }
        }
        self.regularizer.value(x)
    }

    /// The same regularizer constrained to a margin-tightened set.
    pub fn restricted(&self, margin: T) -> Result<Self> {
        let set = match &self.set {
            Some(s) => Some(s.shrink(margin)?),
            None => return Err(Error::Unsupported("restriction needs a feasible set".into())),
        };
        Ok(Self {
            regularizer: self.regularizer.clone(),
            set,
        })
    }
}

/// One time slot of the problem.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Stage<T> {
    pub smooth: SmoothCost<T>,
    pub nonsmooth: NonsmoothCost<T>,
}

/// Finite sequence of composite costs `f_k = g_k + h_k`, `k = 1..K`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TimeVaryingProblem<T> {
    dimension: usize,
    sampling_interval: T,
    stages: Vec<Stage<T>>,
}

impl<T: Scalar> TimeVaryingProblem<T> {
    pub fn new(dimension: usize, sampling_interval: T, stages: Vec<Stage<T>>) -> Result<Self> {
        if dimension == 0 || stages.is_empty() {
            return Err(Error::param("problem", "need positive dimension and horizon"));
        }
        if !(sampling_interval > T::zero()) {
            return Err(Error::param("sampling_interval", "must be positive"));
        }
        for st in &stages {
            if st.smooth.dimension() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: st.smooth.dimension(),
                });
            }
            st.nonsmooth.validate(dimension)?;
        }
        Ok(Self {
            dimension,
            sampling_interval,
            stages,
        })
    }

    /// The same cost at every time index.
    pub fn stationary(stage: Stage<T>, horizon: usize) -> Result<Self> {
        let n = stage.smooth.dimension();
        Self::new(n, T::one(), vec![stage; horizon])
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn horizon(&self) -> usize {
        self.stages.len()
    }

    pub fn sampling_interval(&self) -> T {
        self.sampling_interval
    }

    pub fn stages(&self) -> &[Stage<T>] {
        &self.stages
    }

    /// Stage at time index `k` (1-based).
    pub fn stage(&self, k: usize) -> Result<&Stage<T>> {
        if k == 0 || k > self.stages.len() {
            return Err(Error::IndexOutOfRange {
                k,
                horizon: self.stages.len(),
            });
        }
        Ok(&self.stages[k - 1])
    }

    /// `f_k(x) = g_k(x) + h_k(x)`; `+∞` when `x` violates an indicator.
    pub fn eval_objective(&self, k: usize, x: &[T]) -> Result<T> {
        let st = self.stage(k)?;
        check_dim(x, self.dimension)?;
        let h = st.nonsmooth.value(x);
        if h == T::infinity() {
            return Ok(h);
        }
        Ok(st.smooth.value(x)? + h)
    }

    pub fn grad_smooth(&self, k: usize, x: &[T]) -> Result<Vec<T>> {
        self.stage(k)?.smooth.gradient(x)
    }

    /// `sup_k L_k`
    pub fn lipschitz_sup(&self) -> T {
        self.stages
            .iter()
            .fold(T::zero(), |m, s| m.max(s.smooth.lipschitz()))
    }

    pub fn lipschitz_inf(&self) -> T {
        self.stages
            .iter()
            .fold(T::infinity(), |m, s| m.min(s.smooth.lipschitz()))
    }

    /// `inf_k μ_k`
    pub fn strong_convexity_inf(&self) -> T {
        self.stages
            .iter()
            .fold(T::infinity(), |m, s| m.min(s.smooth.strong_convexity()))
    }

    /// True when every stage carries a (compact) feasible set.
    pub fn all_constrained(&self) -> bool {
        self.stages.iter().all(|s| s.nonsmooth.has_indicator())
    }
}

/// `ρ = max{|1 − αμ|, |1 − αL|}` with a flag for `ρ < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Contraction<T> {
    pub rho: T,
    pub contractive: bool,
}

pub fn contraction_factor<T: Scalar>(alpha: T, mu: T, lipschitz: T) -> Result<Contraction<T>> {
    if !(alpha > T::zero()) {
        return Err(Error::param("alpha", format!("step size must be positive, got {alpha}")));
    }
    if !(mu >= T::zero()) || mu > lipschitz {
        return Err(Error::param(
            "mu",
            format!("need 0 <= mu <= L, got mu={mu}, L={lipschitz}"),
        ));
    }
    let rho = (T::one() - alpha * mu)
        .abs()
        .max((T::one() - alpha * lipschitz).abs());
    Ok(Contraction {
        rho,
        contractive: rho < T::one(),
    })
}

/// Points at which the subgradient bound `D` is estimated.
#[derive(Clone, Debug)]
pub enum DomainSamples<T> {
    /// Caller-supplied points; for each stage only those inside `X_k` count.
    Points(Vec<Vec<T>>),
    /// `per_stage` random feasible points per stage plus box corners.
    Random {
        per_stage: usize,
        seed: u64,
        include_vertices: bool,
    },
}

/// A constant estimated as a maximum over finitely many samples.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledBound<T> {
    pub value: T,
    pub samples: usize,
    pub sample_based: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemConstants<T> {
    pub step_size: T,
    /// `L = sup L_k`
    pub lipschitz: T,
    /// `μ = inf μ_k`
    pub strong_convexity: T,
    pub per_stage_rho: Vec<T>,
    /// `ρ = sup ρ_k`
    pub rho: T,
    pub contractive: bool,
    /// `β = 1/α − inf L_k`
    pub beta: T,
    /// `R = sup R_k`
    pub diameter: Option<T>,
    /// `D ≥ sup_k ‖∂f_k‖` over the sampled region.
    pub subgradient_bound: Option<SampledBound<T>>,
}

pub fn problem_constants<T: Scalar>(
    problem: &TimeVaryingProblem<T>,
    alpha: T,
    domain: Option<&DomainSamples<T>>,
) -> Result<ProblemConstants<T>> {
    let mut per_stage_rho = Vec::with_capacity(problem.horizon());
    for st in problem.stages() {
        per_stage_rho.push(
            contraction_factor(alpha, st.smooth.strong_convexity(), st.smooth.lipschitz())?.rho,
        );
    }
    let rho = per_stage_rho.iter().fold(T::zero(), |m, &r| m.max(r));
    let mut out = ProblemConstants {
        step_size: alpha,
        lipschitz: problem.lipschitz_sup(),
        strong_convexity: problem.strong_convexity_inf(),
        per_stage_rho,
        rho,
        contractive: rho < T::one(),
        beta: T::one() / alpha - problem.lipschitz_inf(),
        diameter: None,
        subgradient_bound: None,
    };
    if let Some(domain) = domain {
        if !problem.all_constrained() {
            return Err(Error::Unsupported(
                "diameter and subgradient bound need a feasible set at every stage".into(),
            ));
        }
        let diameter = problem.stages().iter().fold(T::zero(), |m, s| {
            m.max(s.nonsmooth.set().map_or(T::infinity(), FeasibleSet::diameter))
        });
        out.diameter = Some(diameter);
        out.subgradient_bound = Some(subgradient_bound(problem, domain)?);
    }
    Ok(out)
}

/// `max_k max_x ‖∇g_k(x)‖ + sup‖∂h′_k(x)‖` over the sample points; the
/// indicator contributes the zero element of its normal cone.
pub fn subgradient_bound<T: Scalar>(
    problem: &TimeVaryingProblem<T>,
    domain: &DomainSamples<T>,
) -> Result<SampledBound<T>> {
    let n = problem.dimension();
    let mut best = T::zero();
    let mut count = 0usize;
    let mut visit = |st: &Stage<T>, x: &[T]| -> Result<()> {
        let g = st.smooth.gradient(x)?;
        let v = norm(&g) + st.nonsmooth.regularizer().subgradient_bound(n);
        best = best.max(v);
        count += 1;
        Ok(())
    };
    match domain {
        DomainSamples::Points(points) => {
            for st in problem.stages() {
                for x in points {
                    check_dim(x, n)?;
                    if st.nonsmooth.set().is_none_or(|s| s.contains(x)) {
                        visit(st, x)?;
                    }
                }
            }
        }
        DomainSamples::Random {
            per_stage,
            seed,
            include_vertices,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            for st in problem.stages() {
                let set = st
                    .nonsmooth
                    .set()
                    .ok_or_else(|| Error::Unsupported("random sampling needs a feasible set".into()))?;
                if *include_vertices {
                    for v in set.vertices(4096) {
                        visit(st, &v)?;
                    }
                }
                visit(st, set.anchor())?;
                for _ in 0..*per_stage {
                    let x = set.sample(&mut rng)?;
                    visit(st, &x)?;
                }
            }
        }
    }
    if count == 0 {
        return Err(Error::Data("no feasible sample point for the subgradient bound".into()));
    }
    Ok(SampledBound {
        value: best,
        samples: count,
        sample_based: true,
    })
}
