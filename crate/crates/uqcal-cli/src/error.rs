//! CLI error type carrying the process exit code.

use std::fmt;

/// Exit code 1 for usage problems, 2 for data problems.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unknown names, invalid configuration.
    Usage(String),
    /// Unreadable or malformed input data.
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Data(msg) => write!(f, "data error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

/// Library errors surface as usage problems: they stem from configuration
/// rather than file contents (file contents are validated with line numbers
/// during parsing).
impl From<uqcal::Error> for CliError {
    fn from(err: uqcal::Error) -> Self {
        CliError::Usage(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
