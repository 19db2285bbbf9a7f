use thiserror::Error;

/// Errors raised by the laboratory.
#[derive(Debug, Error)]
pub enum LabError {
    /// A parameter value lies outside the domain of the object being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request needs more than the object can supply (derivative order, dimension).
    #[error("capability error: {0}")]
    Capability(String),

    #[error("validation error: {0}")]
    Validation(String),

    /// A numerical procedure failed to reach its tolerance within budget.
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Configuration problem, with the JSON path of the offending value.
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("emission error: {0}")]
    Emission(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = LabError> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Domain(msg.into()))
}

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(LabError::Validation(msg.into()))
}
