//! Problem generators, experiment drivers and trace I/O for the `tvprox`
//! solver, plus the `tvprox-bench` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod experiment;
pub mod generators;
pub mod report;
pub mod topology;
pub mod trace_csv;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] tvprox::Error),
    #[error("run aborted: {0}")]
    Run(#[from] Box<tvprox::solver::RunFailure<f64>>),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("trace file: {0}")]
    Trace(String),
}

impl BenchError {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        BenchError::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    /// Process exit code: 2 for configuration errors, 3 for runtime failures.
    /// (1 is reserved for runs that complete with a violated bound.)
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            BenchError::Core(e) => match e {
                tvprox::Error::InvalidParameter { .. }
                | tvprox::Error::DimensionMismatch { .. }
                | tvprox::Error::Unsupported(..)
                | tvprox::Error::InfeasibleRestriction(..) => 2,
                _ => 3,
            },
            BenchError::Run(_) | BenchError::Io { .. } | BenchError::Trace(_) => 3,
        }
    }
}
