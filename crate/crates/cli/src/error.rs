use std::path::PathBuf;

use ztnd_core::Termination;

/// Process exit statuses.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_TERMINATED: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{context}: {source}")]
    Core { context: String, source: ztnd_core::Error },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
    #[error("run stopped early: {0}")]
    Terminated(Termination),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn core(context: impl Into<String>, source: ztnd_core::Error) -> Self {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Core { .. } => EXIT_CONFIG,
            CliError::Io { .. } | CliError::Csv { .. } => EXIT_IO,
            CliError::Terminated(_) => EXIT_TERMINATED,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
