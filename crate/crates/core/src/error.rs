//! Error type shared by every module.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MathError {
    /// Input outside the domain of the operation (pole, forbidden order, bad dimension).
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive scheme stopped before reaching the requested tolerance.
    #[error("accuracy error: estimate {estimate:e}, error bound {error_bound:e}")]
    Accuracy { estimate: f64, error_bound: f64 },

    /// A series or integral that does not converge for these parameters.
    #[error("divergent: {0}")]
    Divergent(String),

    /// Malformed external data (profile files, configs).
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, MathError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(MathError::Domain(msg.into()))
}
