use std::path::PathBuf;

use greenfolio_core::ErrorKind;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },

    #[error("{}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },

    #[error("{}: expected header `{expected}`, found `{found}`", path.display())]
    Header { path: PathBuf, expected: &'static str, found: String },

    #[error("{}: row {row}: {message}", path.display())]
    Parse { path: PathBuf, row: u64, message: String },

    #[error("{}: {source}", path.display())]
    Invalid { path: PathBuf, source: greenfolio_core::Error },

    #[error(transparent)]
    Core(#[from] greenfolio_core::Error),

    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Process exit codes.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const DATA: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        let kind = match self {
            Error::Config(_) | Error::Write { .. } => return exit::CONFIG,
            Error::Read { .. } | Error::Header { .. } | Error::Parse { .. } => return exit::DATA,
            Error::Invalid { source, .. } | Error::Core(source) => source.kind(),
        };
        match kind {
            ErrorKind::Validation => exit::DATA,
            ErrorKind::Numerical => exit::NUMERICAL,
            ErrorKind::Config => exit::CONFIG,
        }
    }
}

/// An error tagged with the pipeline stage that produced it.
#[derive(Debug, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct StageError {
    pub stage: &'static str,
    #[source]
    pub source: Error,
}

impl StageError {
    pub fn exit_code(&self) -> i32 {
        self.source.exit_code()
    }
}

pub trait WithStage<T> {
    fn stage(self, stage: &'static str) -> Result<T, StageError>;
}

impl<T, E: Into<Error>> WithStage<T> for std::result::Result<T, E> {
    fn stage(self, stage: &'static str) -> Result<T, StageError> {
        self.map_err(|e| StageError { stage, source: e.into() })
    }
}
