//! Command-line front end for MSSAL mixture clustering.
//!
//! Exit codes: 0 on success, 1 when model fitting fails, 2 for usage and
//! I/O errors.

pub mod commands;
pub mod model_file;

pub use commands::{run, timing_sweep, Cli, Command, TimingRow};
pub use model_file::{ComponentRecord, FitMetadata, ModelFile, SelectionRow, SCHEMA_VERSION};

use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A model file that does not parse or violates a parameter constraint.
    #[error("{0}")]
    InvalidModel(String),

    /// Fitting ran but produced nothing usable.
    #[error("{0}")]
    Fit(String),

    #[error(transparent)]
    Core(#[from] mssal::Error),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::InvalidModel(_) => 2,
            CliError::Fit(_) => 1,
            CliError::Core(e) if e.is_usage_or_io() => 2,
            CliError::Core(_) => 1,
        }
    }
}
