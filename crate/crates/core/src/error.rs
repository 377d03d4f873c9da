use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or input failed validation.
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    /// Two vectors that must share a dimension did not.
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    /// The dispersion constraint could not be met (|i| > n/2). Callers redraw the round.
    #[error("degenerate round: support size {support} exceeds n/2 = {half}")]
    Resample { support: usize, half: usize },

    /// A round kept producing degenerate draws.
    #[error("round {round} still degenerate after {attempts} attempts")]
    ResampleExhausted { round: u64, attempts: u32 },

    /// A sweep run failed; carries the offending sweep value.
    #[error("sweep value {param} = {value}: {source}")]
    Sweep {
        param: String,
        value: String,
        #[source]
        source: Box<Error>,
    },

    /// Malformed CSV contents.
    #[error("bad CSV data: {0}")]
    Format(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for this error (2 validation, 3 runtime abort, 4 I/O).
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidParams(_) | Error::LengthMismatch { .. } | Error::Format(_) => 2,
            Error::Resample { .. } | Error::ResampleExhausted { .. } => 3,
            Error::Io { .. } => 4,
            Error::Sweep { source, .. } => source.exit_code(),
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
