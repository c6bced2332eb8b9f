use thiserror::Error;

/// Errors raised by the physics routines and the numerical oracles.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violates a precondition (non-positive mass, negative `w`, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative routine did not converge or a decomposition failed.
    #[error("numeric error: {message} ({diagnostics})")]
    Numeric {
        message: String,
        diagnostics: String,
    },

    /// A grid or quadrature configuration is unusable for the target state.
    #[error("configuration error: {0}")]
    Config(String),

    /// An internal consistency check failed; this indicates a bug.
    #[error("implementation error: {0}")]
    Implementation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn ensure_positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive and finite, got {value}")))
    }
}
