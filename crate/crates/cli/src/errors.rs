//! Exit-code policy: 0 success, 2 usage, 3 data/parse, 4 numeric.

use repeatstat::Error;
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Numeric(m) => write!(f, "numeric error: {m}"),
        }
    }
}

/// Library error raised while validating user-supplied parameters.
pub fn usage(err: Error) -> CliError {
    match err {
        Error::NonConvergence { .. } => CliError::Numeric(err.to_string()),
        other => CliError::Usage(other.to_string()),
    }
}

/// Library error raised while processing data.
pub fn data(err: Error) -> CliError {
    match err {
        Error::NonConvergence { .. } => CliError::Numeric(err.to_string()),
        other => CliError::Data(other.to_string()),
    }
}

pub fn io(context: &str, err: std::io::Error) -> CliError {
    CliError::Data(format!("{context}: {err}"))
}

pub type CliResult<T> = Result<T, CliError>;
