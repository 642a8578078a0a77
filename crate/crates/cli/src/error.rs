use std::io;

use thiserror::Error;

/// Process exit status for rejected input.
pub const EXIT_CONFIG: i32 = 2;
/// Process exit status when a guaranteed containment or invariant fails.
pub const EXIT_FAILURE: i32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid configuration or input file; nothing was executed.
    #[error("{0}")]
    Config(String),

    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    pub fn io(context: impl Into<String>, source: io::Error) -> Self {
        CliError::Io { context: context.into(), source }
    }

    pub fn exit_code(&self) -> i32 {
        EXIT_CONFIG
    }
}

impl From<shadowrec_core::Error> for CliError {
    fn from(e: shadowrec_core::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io { context: "writing CSV".into(), source: io::Error::other(e.to_string()) }
    }
}
