//! Errors with exit codes.
//!
//! 1: an input was read but a structural check failed.
//! 2: malformed input or bad arguments.
//! 3: I/O failure.

use std::fmt;
use std::path::Path;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn structural(message: impl Into<String>) -> CliError {
        CliError { code: 1, message: message.into() }
    }

    pub fn parse(message: impl Into<String>) -> CliError {
        CliError { code: 2, message: message.into() }
    }

    pub fn usage(message: impl Into<String>) -> CliError {
        CliError { code: 2, message: message.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> CliError {
        CliError { code: 3, message: format!("{}: {e}", path.display()) }
    }

    /// Library errors: parse and JSON problems are input errors, the rest
    /// structural.
    pub fn from_lib(context: &str, e: rscancel::Error) -> CliError {
        use rscancel::Error as E;
        let code = match e {
            E::Parse(_) | E::Json(_) => 2,
            _ => 1,
        };
        CliError { code, message: format!("{context}: {e}") }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

pub fn read(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write(path: &Path, contents: &str) -> CliResult<()> {
    std::fs::write(path, contents).map_err(|e| CliError::io(path, e))
}
