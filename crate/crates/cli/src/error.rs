use thiserror::Error;

/// Failures of a run, each mapped to one exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// The configuration does not describe a valid problem.
    #[error("invalid config: {0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] corona_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 3,
            CliError::Core(_) | CliError::Io { .. } => 1,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
