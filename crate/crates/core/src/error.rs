use thiserror::Error;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    /// An argument violates a precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A truncated infinite series or product hit its term cap.
    #[error("{what} did not converge within {terms} terms (partial value {partial:e})")]
    Convergence {
        what: &'static str,
        terms: usize,
        partial: f64,
    },

    /// An intermediate magnitude left the representable range.
    #[error("{what} left the representable range; use the scaled representation or a higher --precision")]
    Overflow { what: &'static str },
}

impl QError {
    pub fn domain(msg: impl Into<String>) -> Self {
        QError::Domain(msg.into())
    }
}

pub type Result<T, E = QError> = std::result::Result<T, E>;
