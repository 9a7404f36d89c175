use std::path::PathBuf;

use rcndl_core::Error;
use thiserror::Error as ThisError;

/// Process exit codes.
pub const EXIT_CONVERGED: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NOT_CONVERGED: i32 = 2;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// Anything wrong with a model or evidence file.
    #[error("{}: {source}", path.display())]
    Input { path: PathBuf, source: Error },
    #[error(transparent)]
    Run(#[from] Error),
    #[error("cannot serialize report: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 when a numerical solver gave up, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Run(Error::NonConvergence { .. } | Error::Divergence { .. }) => {
                EXIT_NOT_CONVERGED
            }
            _ => EXIT_INPUT,
        }
    }
}
