use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("label {label} out of range for site {site} of dimension {dim}")]
    IndexOutOfRange { site: usize, label: usize, dim: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("numerically null state (total probability {0:e})")]
    NullState(f64),

    #[error("path budget exceeded: {paths} paths > limit {limit}")]
    BudgetExceeded { paths: u128, limit: u128 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("{what} disagree (residual {residual:e})")]
    Inconsistent { what: String, residual: f64 },

    #[error("invalid bundle: {0}")]
    InvalidBundle(String),

    #[error("{path}:{line}: {message}")]
    Parse { path: String, line: usize, message: String },

    #[error("bad state file {path}: {message}")]
    StateFile { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, message: message.into() }
    }
}
