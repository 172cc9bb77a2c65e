use std::path::{Path, PathBuf};

use thiserror::Error;

/// Errors that stop a run before any assertion is evaluated; all map to
/// exit status 2.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Input {
        context: String,
        #[source]
        source: hexsum_core::HexError,
    },
    #[error(transparent)]
    Core(#[from] hexsum_core::HexError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}
