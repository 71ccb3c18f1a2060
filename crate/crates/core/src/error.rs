use std::path::PathBuf;

use crate::grid::GridDims;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid dimensions {width}x{height} (each side must be in 1..=1024)")]
    InvalidDims { width: usize, height: usize },

    #[error("invalid raster: {0}")]
    InvalidRaster(String),

    #[error("raster contains no ink pixels (blank submission)")]
    EmptyRaster,

    #[error("invalid digitizer parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimsMismatch { expected: GridDims, found: GridDims },

    #[error("invalid label {label:?}: {reason}")]
    InvalidLabel { label: String, reason: &'static str },

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("recognition quotient undefined for {0:?}: no positive weights")]
    UndefinedQuotient(String),

    #[error("label {0:?} has reached the maximum teach count")]
    TeachLimit(String),

    #[error("parse error at line {line}{}: {reason}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        reason: String,
    },

    #[error("invariant violation for label {label:?}: {reason}")]
    InvariantViolation { label: String, reason: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column: None,
            reason: reason.into(),
        }
    }

    pub(crate) fn parse_at(line: usize, column: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column: Some(column),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
