use thiserror::Error;

use crate::scalar::Scalar;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty set: {0}")]
    Empty(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A builder or refuter hypothesis that the inputs do not satisfy.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("guard exceeded: {what} needs an estimated {estimate} items (limit {limit})")]
    GuardExceeded { what: String, estimate: u128, limit: u128 },

    #[error("{value} is not divisible by {step}")]
    Divisibility { value: Scalar, step: Scalar },

    #[error("point does not belong to the declared block: {0}")]
    NotInSpace(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn hypothesis(msg: impl Into<String>) -> Self {
        Error::Hypothesis(msg.into())
    }
}
