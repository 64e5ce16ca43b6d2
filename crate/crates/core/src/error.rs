use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("line {line}: {message}")]
    Scheme { line: usize, message: String },

    #[error("{0}")]
    Usage(String),

    /// An internal consistency check failed. Seeing this means a bug.
    #[error("internal defect: {0}")]
    Defect(String),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Self::Usage(msg.into())
    }

    pub(crate) fn defect(msg: impl Into<String>) -> Self {
        Self::Defect(msg.into())
    }

    /// True for errors caused by bad input rather than a failed check.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Self::Defect(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
