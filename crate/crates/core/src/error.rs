use thiserror::Error;

pub type Result<T> = std::result::Result<T, CohqError>;

#[derive(Debug, Error)]
pub enum CohqError {
    #[error("configuration error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("operands live on different Fock spaces ({left} vs {right})")]
    SpaceMismatch { left: String, right: String },

    #[error("usage error: {0}")]
    Usage(String),

    /// The constraint admits no physical states for the requested parameters.
    #[error("no physical states: {0}")]
    NoPhysicalStates(String),

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("truncation too small: need cutoff >= {required_cutoff}, have {cutoff}")]
    TruncationTooSmall { required_cutoff: usize, cutoff: usize },

    #[error("state has zero physical norm")]
    NotPhysical,

    #[error("state has zero norm")]
    ZeroNorm,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CohqError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        CohqError::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit status used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            CohqError::NoPhysicalStates(_) => 3,
            CohqError::UnsupportedModel(_) => 4,
            _ => 2,
        }
    }
}
