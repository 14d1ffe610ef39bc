use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("non-finite value at position {index} in {context}")]
    NonFinite { context: &'static str, index: usize },
    #[error("matrix is not positive definite (pivot {pivot} broke down with value {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("exhaustive NNLS supports at most {max} columns, got {cols}")]
    TooManyColumns { cols: usize, max: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("sample column {column} has zero l2 norm")]
    ZeroNormSample { column: usize },
    #[error("class {class} has no training samples")]
    EmptyClass { class: usize },
    #[error("query has zero l2 norm")]
    ZeroNormQuery,
    #[error("bad dimension: {0}")]
    BadDimension(String),
    #[error("bad IDX magic number {0:#010x}")]
    BadMagic(u32),
    #[error("file truncated: {0}")]
    TruncatedFile(String),
    #[error("unsupported IDX element type {0:#04x}")]
    UnsupportedElementType(u8),
    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, field {field}: non-numeric value {value:?}")]
    NonNumericField {
        row: usize,
        field: usize,
        value: String,
    },
    #[error("class {class} has {available} samples, {required} required")]
    ClassTooSmall {
        class: i64,
        available: usize,
        required: usize,
    },
    #[error("label {0} is not one of the dataset's classes")]
    UnknownLabel(i64),
    #[error("malformed {what}: {message}")]
    Format { what: &'static str, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<Error>,
    },
}

/// Broad failure classes, used by the command-line front end to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn format(what: &'static str, message: impl Into<String>) -> Self {
        Error::Format {
            what,
            message: message.into(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidConfig(_) => ErrorKind::Usage,
            Error::NotPositiveDefinite { .. } | Error::NonFinite { .. } | Error::TooManyColumns { .. } => {
                ErrorKind::Numerical
            }
            Error::Trial { source, .. } => source.kind(),
            _ => ErrorKind::Data,
        }
    }
}
