use std::io;
use std::path::{Path, PathBuf};

/// A problem with the contents of a text file, located by 1-based line.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: expected header `{expected}`, found `{found}`")]
    BadMagic { line: usize, expected: &'static str, found: String },
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: cannot parse `{token}` as a number")]
    BadNumber { line: usize, token: String },
    #[error("line {line}: expected {expected} values, found {found}")]
    DimensionMismatch { line: usize, expected: usize, found: usize },
    #[error("line {line}: duplicate id `{id}`")]
    DuplicateId { line: usize, id: String },
    #[error("line {line}: non-finite value in field {field}")]
    NonFinite { line: usize, field: usize },
    #[error("header declares {declared} rows but the file has {found}")]
    RowCountMismatch { declared: usize, found: usize },
    #[error("line {line}: unexpected end of file")]
    UnexpectedEof { line: usize },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: triage_core::Error,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {source}", path.display())]
    Format {
        path: PathBuf,
        #[source]
        source: FormatError,
    },
    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: triage_core::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Error {
        Error::Io { path: path.to_path_buf(), source }
    }

    pub fn format(path: &Path, source: FormatError) -> Error {
        Error::Format { path: path.to_path_buf(), source }
    }

    /// Process exit code: 1 usage, 2 data, 3 numeric or convergence.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Io { .. } | Error::Format { .. } => 2,
            Error::Core { source, .. } if source.is_numeric() => 3,
            Error::Core { .. } => 2,
        }
    }
}

/// Attaches a context string to core errors.
pub trait Context<T> {
    fn context(self, context: impl Into<String>) -> Result<T>;
}

impl<T> Context<T> for std::result::Result<T, triage_core::Error> {
    fn context(self, context: impl Into<String>) -> Result<T> {
        self.map_err(|source| Error::Core { context: context.into(), source })
    }
}
