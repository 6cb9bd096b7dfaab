use thiserror::Error;

/// Everything that stops an instance from producing a report. All variants
/// are input errors as far as the exit-code contract is concerned.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("instance does not match the schema: {0}")]
    Schema(String),
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] cnp_core::Error),
}

impl CliError {
    /// Module-qualified error code, e.g. `input.json` or `kernels.domain`.
    pub fn code(&self) -> String {
        match self {
            CliError::Io { .. } => "input.io".into(),
            CliError::Json(_) => "input.json".into(),
            CliError::Schema(_) => "input.schema".into(),
            CliError::Invalid(_) => "input.invalid".into(),
            CliError::Core(e) => e.code().to_string(),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
