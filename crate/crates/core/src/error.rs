//! Crate-wide error type.

/// Errors raised by ingestion, validation, and numeric routines.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A row of an input file could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    /// Structurally inconsistent data (missing samples, duplicate keys, ...).
    #[error("integrity error: {0}")]
    Integrity(String),

    /// A value is outside its documented domain.
    #[error("validation error: {0}")]
    Validation(String),

    /// Input admits no meaningful answer (e.g. all points coincident).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// An API precondition was not met by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A numeric routine produced NaN or otherwise failed.
    #[error("numerical failure at frame {frame}: {msg}")]
    Numerical { frame: usize, msg: String },

    /// Requested raster dimensions are too large.
    #[error("image size error: {0}")]
    ImageSize(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("png encoding error: {0}")]
    Png(String),
}

impl From<png::EncodingError> for Error {
    fn from(e: png::EncodingError) -> Self {
        Error::Png(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
