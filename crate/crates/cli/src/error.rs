use radpair_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid flags, config file, or input data.
    #[error("{0}")]
    Config(String),
    /// A state left the physical region during propagation.
    #[error("{0}")]
    Runtime(String),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn io(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> Self {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvariantViolation { .. } => CliError::Runtime(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}
