use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_PARSE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_CONFIG: i32 = 4;

/// A malformed input cell. `line` and `column` are 1-based; `column` counts
/// CSV fields, not characters.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{}:{line}:{column}: {message}", file.display())]
pub struct ParseError {
    pub file: PathBuf,
    pub line: u64,
    pub column: usize,
    pub message: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),
    #[error("config error: {0}")]
    Config(String),
    #[error("{stage}: {source}")]
    Numeric {
        stage: String,
        #[source]
        source: econet_core::Error,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Numeric { .. } => EXIT_NUMERIC,
            CliError::Config(_) | CliError::Io { .. } => EXIT_CONFIG,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

/// Attach a pipeline stage to a core error.
pub trait StageExt<T> {
    fn stage(self, stage: impl Into<String>) -> Result<T>;
}

impl<T> StageExt<T> for econet_core::Result<T> {
    fn stage(self, stage: impl Into<String>) -> Result<T> {
        self.map_err(|source| CliError::Numeric {
            stage: stage.into(),
            source,
        })
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
