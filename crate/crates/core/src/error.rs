use thiserror::Error;

/// Errors raised by the sampling library and the experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated a documented precondition.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A run configuration failed validation.
    #[error("config error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    /// The spectral or quadrature oracle could not certify its result.
    #[error("oracle failure: {0}")]
    Oracle(String),

    /// All weights in an ensemble were `-inf`; the log-domain contract was broken.
    #[error("degenerate weights: every log-weight is -inf")]
    DegenerateWeights,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the CLI: 2 for validation problems, 3 for oracle failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter { .. } | Error::Config { .. } => 2,
            Error::Oracle(_) => 3,
            _ => 1,
        }
    }
}
