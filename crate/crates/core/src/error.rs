//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Duplicate or decreasing frequency sample in a grid.
    #[error("non-ascending frequency at sample {index}: {prev} Hz followed by {next} Hz")]
    NonAscendingFrequency { index: usize, prev: f64, next: f64 },

    /// A data record with the wrong number of values, or a token that is not a number.
    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },

    /// Touchstone data for a port count other than 2 or 4.
    #[error("unsupported port count {ports} (only 2- and 4-port data are handled)")]
    UnsupportedPortCount { ports: usize },

    /// A parsed value that is NaN or infinite after format conversion.
    #[error("non-finite value at line {line}: {token:?}")]
    NumericOverflow { line: usize, token: String },

    /// Phase requested for a sample with zero magnitude.
    #[error("zero-magnitude sample at index {index}: phase is undefined")]
    ZeroMagnitudeSample { index: usize },

    /// Arrays that should share a frequency grid do not.
    #[error("frequency grid mismatch: {0}")]
    GridMismatch(String),

    /// A band query that selects no samples.
    #[error("empty band: {0}")]
    EmptyBand(String),

    /// Synthetic channel parameters that produce gain above unity.
    #[error("passivity violation: |A| = {magnitude} > 1 at {freq} Hz")]
    PassivityViolation { freq: f64, magnitude: f64 },

    /// Uniform-grid operation invoked on a non-uniform grid with resampling disabled.
    #[error("non-uniform frequency grid: {0}")]
    NonUniformGrid(String),

    /// Batch invoked with no inputs.
    #[error("empty input: no files to analyze")]
    EmptyInput,

    /// A feature present in the input that this crate deliberately does not handle.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Invalid argument or configuration value.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }
}
