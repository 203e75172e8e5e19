use thiserror::Error;

/// Library-wide error type.
///
/// `InvalidParameter` marks configuration/domain violations (reject before
/// running); the remaining variants are runtime failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("unknown strategy `{name}` (available: {available})")]
    UnknownStrategy { name: String, available: String },

    #[error("numerical degeneracy in {context}: {reason}")]
    NumericalDegeneracy {
        context: &'static str,
        reason: String,
    },

    #[error("{failed} of {total} frames failed ({rate:.2e} > abort threshold {threshold:.2e})")]
    ExcessiveFrameFailures {
        failed: u64,
        total: u64,
        rate: f64,
        threshold: f64,
    },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),
}

impl Error {
    pub fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for errors that indicate bad user input rather than a runtime
    /// failure; the CLI maps these to a distinct exit code.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. } | Error::UnknownStrategy { .. } | Error::EmptyInput(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
