use serde::Serialize;
use thiserror::Error;

/// Errors raised by the numerical routines and the CLI layer.
#[derive(Debug, Clone, PartialEq, Error, Serialize)]
#[serde(tag = "kind", content = "detail", rename_all = "kebab-case")]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("budget exceeded: {budget} is {value}, limit {limit}")]
    Budget {
        budget: String,
        value: usize,
        limit: usize,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }

    pub(crate) fn budget(budget: impl Into<String>, value: usize, limit: usize) -> Self {
        Error::Budget {
            budget: budget.into(),
            value,
            limit,
        }
    }

    /// Checks `value <= limit`, naming the budget on failure.
    pub(crate) fn check_budget(budget: &str, value: usize, limit: usize) -> Result<()> {
        if value > limit {
            Err(Error::budget(budget, value, limit))
        } else {
            Ok(())
        }
    }
}
