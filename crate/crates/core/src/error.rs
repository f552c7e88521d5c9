//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {context}")]
    NonFinite { context: String },

    #[error("hypervolume is only implemented for 2 or 3 objectives, got {m}")]
    UnsupportedObjectiveCount { m: usize },

    #[error("empty input: {context}")]
    EmptyInput { context: String },

    #[error("invalid argument: {context}")]
    InvalidArgument { context: String },

    #[error("encoder error: {context}")]
    Encoder { context: String },

    #[error("task error: {context}")]
    Task { context: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {context}")]
    Parse { context: String },
}

impl CoreError {
    pub fn non_finite(context: impl Into<String>) -> Self {
        CoreError::NonFinite {
            context: context.into(),
        }
    }

    pub fn invalid(context: impl Into<String>) -> Self {
        CoreError::InvalidArgument {
            context: context.into(),
        }
    }

    pub fn parse(context: impl Into<String>) -> Self {
        CoreError::Parse {
            context: context.into(),
        }
    }
}
