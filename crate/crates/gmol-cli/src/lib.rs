//! Library half of the `gmol` command-line tool: configuration parsing,
//! dataset writers, shipped example parameter sets, and the subcommand
//! implementations. The binary in `main.rs` only handles argument parsing
//! and exit-code mapping.

pub mod commands;
pub mod config;
pub mod output;
pub mod presets;

use thiserror::Error;

/// Command failure, carrying its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// A cross-check reported a deviation beyond tolerance (exit 1).
    #[error("validation failed: {0}")]
    Validation(String),
    /// Unreadable, unparsable, or physically invalid configuration (exit 2).
    #[error("config error: {0}")]
    Config(String),
    /// Filesystem failure while writing datasets (exit 3).
    #[error("i/o error: {0}")]
    Io(String),
    /// A grid cell hit the scattering pole under --strict (exit 4).
    #[error("strict mode: {0}")]
    StrictPole(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io(_) => 3,
            CliError::StrictPole(_) => 4,
        }
    }
}
