//! Reference optima, drift and error aggregates, and bound evaluation.

mod bounds;
mod metrics;
mod optimum;

pub use bounds::{
    bound_holds, convex_regret_rhs, evaluate_regret_bounds, evaluate_tracking_bounds, unrolled_rhs,
    BoundKind, BoundReport, BoundSeries, BoundSummary, DriftLevels, RegretOptions, BOUND_RTOL,
};
pub use metrics::{
    error_aggregates, path_metrics, regret_series, tracking_series, ErrorAggregates, OptimaPath,
    TrackingSeries,
};
pub use optimum::{reference_optimum, solve_optima_path, OptimumMethod, DEFAULT_TOLERANCE};
