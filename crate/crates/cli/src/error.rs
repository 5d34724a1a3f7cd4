use std::fmt::Display;

use thiserror::Error;

/// Failure classes of the command line, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl CliError {
    pub fn config(field: &str, reason: impl Display) -> Self {
        CliError::Config(format!("{field}: {reason}"))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<slar_core::Error> for CliError {
    fn from(e: slar_core::Error) -> Self {
        use slar_core::Error as E;
        match e {
            E::Io(io) => CliError::Io(io.to_string()),
            E::NotConverged { .. } => CliError::Solver(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}
