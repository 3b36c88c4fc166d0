use std::path::PathBuf;

use gammaforge_core::Error as CoreError;

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    pub const IO: u8 = 1;
    pub const PARSE: u8 = 2;
    pub const DEGENERATE: u8 = 3;
    pub const TOLERANCE: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("cannot read {path}: {source}", path = .path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error("cannot write {path}: {source}", path = .path.display())]
    Write { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}", path = .path.display())]
    Json { path: PathBuf, source: serde_json::Error },

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) | Self::Read { .. } | Self::Json { .. } => exit::PARSE,
            Self::Write { .. } => exit::IO,
            Self::Core(e) => match e {
                CoreError::NotPositiveDefinite { .. }
                | CoreError::Singular { .. }
                | CoreError::NoInvariantDensity { .. }
                | CoreError::IllConditioned { .. }
                | CoreError::Domain { .. }
                | CoreError::TimeTooSmall { .. } => exit::DEGENERATE,
                _ => exit::PARSE,
            },
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
