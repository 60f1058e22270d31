use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("time index {k} outside 1..={horizon}")]
    IndexOutOfRange { k: usize, horizon: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("point outside the domain at index {index}: {reason}")]
    Domain { index: usize, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{method} stopped after {iterations} iterations with residual {residual:e}")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("restricted feasible set is empty: {0}")]
    InfeasibleRestriction(String),

    #[error("inconsistent data: {0}")]
    Data(String),

    #[error("step {k}: {source}")]
    Step { k: usize, source: Box<Error> },
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_step(self, k: usize) -> Self {
        match self {
            e @ Error::Step { .. } => e,
            e => Error::Step {
                k,
                source: Box::new(e),
            },
        }
    }
}
