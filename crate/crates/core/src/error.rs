use thiserror::Error;

/// Errors raised by the numerical modules and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    /// An argument lies outside the region where the routine is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative or adaptive computation failed to meet its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// True for errors that the CLI reports with exit code 1.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Validation { .. } | Error::Domain(_) | Error::Json(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
