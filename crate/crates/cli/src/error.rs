use std::path::PathBuf;

use talenti_core::Error as CoreError;

/// CLI-level errors with the exit-code contract:
/// 0 all checks pass, 2 at least one check fails, 3 configuration or
/// hypothesis error, 4 convergence error, 1 anything else.
#[derive(Debug)]
pub enum CliError {
    Config { pointer: String, message: String },
    Core { context: String, source: CoreError },
    Io { path: PathBuf, message: String },
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config { pointer, message } => {
                write!(f, "configuration error at {pointer}: {message}")
            }
            CliError::Core { context, source } => {
                if context.is_empty() {
                    write!(f, "{source}")
                } else {
                    write!(f, "{context}: {source}")
                }
            }
            CliError::Io { path, message } => write!(f, "{}: {message}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn config(pointer: impl Into<String>, message: impl Into<String>) -> CliError {
        CliError::Config {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    pub fn core(context: impl Into<String>, source: CoreError) -> CliError {
        CliError::Core {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 3,
            CliError::Core { source, .. } => match source {
                CoreError::Hypothesis(_) => 3,
                CoreError::Parameter(_) => 3,
                CoreError::Convergence { .. } => 4,
                _ => 1,
            },
            CliError::Io { .. } => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
