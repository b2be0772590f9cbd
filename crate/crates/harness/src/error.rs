use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad keys, malformed values or out-of-range parameters.
    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error(transparent)]
    Numerical(#[from] discord_dyn::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
}

impl HarnessError {
    pub fn validation(msg: impl Into<String>) -> Self {
        Self::Validation(msg.into())
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Process exit status: 1 validation, 2 numerical, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Validation(_) => 1,
            Self::Numerical(_) => 2,
            Self::Io { .. } => 3,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
