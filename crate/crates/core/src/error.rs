use std::path::PathBuf;

use thiserror::Error;

/// Reasons a PGM byte stream is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgmErrorKind {
    #[error("bad magic number (expected P2 or P5)")]
    BadMagic,
    #[error("non-numeric header token")]
    BadToken,
    #[error("unexpected end of header")]
    TruncatedHeader,
    #[error("image dimensions must be positive")]
    ZeroDimension,
    #[error("maxval {0} is outside 1..=255")]
    BadMaxval(u32),
    #[error("truncated payload: expected {expected} samples, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("sample value {value} exceeds maxval {maxval}")]
    SampleOutOfRange { value: u32, maxval: u32 },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("pgm decode error at byte {offset}: {kind}")]
    Pgm { offset: usize, kind: PgmErrorKind },

    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("pixel ({x}, {y}) has intensity {value} which cannot be stored as an 8-bit sample")]
    Unrepresentable { x: usize, y: usize, value: f64 },

    #[error("invalid worker config: {0}")]
    InvalidWorkers(String),

    #[error("invalid gaussian sigma {0}")]
    InvalidSigma(f64),

    #[error("invalid thresholds: low {low} > high {high} or negative")]
    InvalidThresholds { low: f64, high: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("report serialization failed: {0}")]
    Report(String),
}

impl Error {
    pub(crate) fn pgm(offset: usize, kind: PgmErrorKind) -> Self {
        Error::Pgm { offset, kind }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
