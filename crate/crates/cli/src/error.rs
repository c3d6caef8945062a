use std::path::PathBuf;

use fcs_core::FcsError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] FcsError),

    #[error("config error: {0}")]
    Usage(String),

    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// Audit finished but some checks failed; the table has been printed.
    #[error("audit failed: {0}")]
    AuditFailed(String),
}

impl CliError {
    /// Process exit status: 1 config, 2 convergence, 3 consistency,
    /// 4 inequality violation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => match e {
                FcsError::Convergence { .. } => 2,
                FcsError::Consistency { .. } | FcsError::NotHermitian { .. } => 3,
                FcsError::InequalityViolation(_) => 4,
                _ => 1,
            },
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::AuditFailed(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
