use std::io;
use std::path::PathBuf;

use polarisim_core::Error as ModelError;

/// Process exit status for a failed run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Usage = 2,
    Computation = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("invalid config {path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("invalid data file {path}: {message}")]
    Data { path: PathBuf, message: String },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Model(#[from] ModelError),
    #[error(
        "time-domain error {error:.3e} exceeds tolerance {tolerance:.0e} (worst at {omega} cm^-1)"
    )]
    OracleMismatch {
        error: f64,
        tolerance: f64,
        omega: f64,
    },
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_)
            | CliError::Read { .. }
            | CliError::Config { .. }
            | CliError::Data { .. }
            | CliError::Write { .. } => ExitStatus::Usage,
            CliError::Model(e) => model_status(e),
            CliError::OracleMismatch { .. } => ExitStatus::Computation,
        }
    }
}

/// Invalid inputs are configuration errors; everything else failed while
/// computing.
fn model_status(e: &ModelError) -> ExitStatus {
    match e {
        ModelError::OutOfRange(_)
        | ModelError::InvalidGrid(_)
        | ModelError::UnsupportedElectricalAnharmonicity { .. }
        | ModelError::DegenerateLinewidths { .. }
        | ModelError::StepTooLarge { .. }
        | ModelError::InvalidPulse(_) => ExitStatus::Usage,
        _ => ExitStatus::Computation,
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
