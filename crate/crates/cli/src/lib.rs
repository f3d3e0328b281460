//! Command implementations behind the `krange` binary.
//!
//! Exit-code contract: 0 success, 1 mathematical failure (a report with a
//! witness is still written), 2 I/O, parse or usage error.

pub mod commands;
pub mod format;
pub mod tol;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("usage error: {0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        2
    }
}
