//! Configuration, dispatch and serialization for the `dirac-lattice`
//! command-line driver.
//!
//! A run is described by one TOML document; [`parse_config`] validates it
//! into a [`RunConfig`] and [`run_command`] executes it, writing every
//! artifact under the configured path prefix.

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, AuditKind, Command, Format, RunConfig};
pub use run::{run_command, Outcome};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Config(String),
    /// Data or settings rejected by the library (unmet hypotheses,
    /// unresolved mollifiers, planning failures).
    #[error("{0}")]
    Input(dirac_lattice::Error),
    /// Blow-up or another failed computation.
    #[error("{0}")]
    Failure(dirac_lattice::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) | CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Failure(_) | CliError::Io { .. } => 1,
        }
    }
}

impl From<dirac_lattice::Error> for CliError {
    fn from(e: dirac_lattice::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e)
        } else {
            CliError::Failure(e)
        }
    }
}
