use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {left} vs {right}")]
    Shape { left: String, right: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("bound violation: |u({i},{j})| = {value} >= 1")]
    BoundViolation { i: usize, j: usize, value: f64 },

    #[error("infeasible mass target {target}: admissible range is ({min}, {max})")]
    Infeasible { target: f64, min: f64, max: f64 },

    #[error("mass multiplier solve did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("config line {line}: {message}")]
    ConfigParse { line: usize, message: String },

    #[error("invalid config: {0}")]
    Validation(String),

    #[error("snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(left: impl std::fmt::Debug, right: impl std::fmt::Debug) -> Self {
        Error::Shape {
            left: format!("{left:?}"),
            right: format!("{right:?}"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
