//! Online inexact proximal-gradient method for time-varying composite convex
//! problems `min_x g_k(x) + h_k(x)`.
//!
//! At each time index the solver takes one step
//! `y_k = x_{k−1} − α ∇̃g_k(x_{k−1})`, `x_k ≈_{ε_k} prox_{αh_k}(y_k)`
//! using an inexact gradient and an ε-inexact proximal operator, and the
//! [`analysis`] module evaluates the tracking and dynamic-regret bounds of the
//! method against measured runs.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix `f64`, with `F32*` variants for single precision.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod problem;
pub mod prox;
mod scalar;
pub mod solver;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Problem = problem::TimeVaryingProblem<f64>;
pub type Stage = problem::Stage<f64>;
pub type SmoothCost = problem::SmoothCost<f64>;
pub type NonsmoothCost = problem::NonsmoothCost<f64>;
pub type FeasibleSet = problem::FeasibleSet<f64>;
pub type Polytope = problem::Polytope<f64>;
pub type Matrix = linalg::DenseMatrix<f64>;
pub type ProxResult = prox::ProxResult<f64>;
pub type ProxOracleConfig = prox::ProxOracleConfig<f64>;
pub type GradientOracle = oracle::GradientOracle<f64>;
pub type GradientEstimate = oracle::GradientEstimate<f64>;
pub type ZerothOrderConfig = oracle::ZerothOrderConfig<f64>;
pub type SolverConfig = solver::SolverConfig<f64>;
pub type StepRecord = solver::StepRecord<f64>;
pub type RunTrace = solver::RunTrace<f64>;
pub type OptimaPath = analysis::OptimaPath<f64>;
pub type BoundReport = analysis::BoundReport<f64>;
pub type ProblemConstants = problem::ProblemConstants<f64>;

pub type F32Problem = problem::TimeVaryingProblem<f32>;
pub type F32SolverConfig = solver::SolverConfig<f32>;
pub type F32RunTrace = solver::RunTrace<f32>;
