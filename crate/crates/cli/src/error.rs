use std::fmt;

use lifelog_core::Error as CoreError;

/// CLI-level error with a process exit code: 1 usage, 2 data/invariant,
/// 3 internal.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(CoreError),
    Internal(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn internal(msg: impl fmt::Display) -> Self {
        CliError::Internal(msg.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Data(err) => write!(f, "{err}"),
            CliError::Internal(msg) => write!(f, "internal error: {msg}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        match err {
            // Misconfiguration surfaced by the core validators is flag
            // misuse from the CLI's point of view.
            CoreError::Config(msg) => CliError::Usage(msg),
            other => CliError::Data(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
