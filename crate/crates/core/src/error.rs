use thiserror::Error;

/// Errors raised by the decomposition and certificate engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input that violates a type invariant or an operation's domain.
    #[error("invalid input at {path}: {message}")]
    InvalidInput { path: String, message: String },

    /// A stated precondition of a construction failed.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// An iterative solver did not reach its target residual.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
}

impl Error {
    pub fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::InvalidInput {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn precondition(message: impl Into<String>) -> Self {
        Error::Precondition(message.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
