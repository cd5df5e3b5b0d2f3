//! Command implementations behind the `fixpoint-vi` binary.
//!
//! Exit codes: 0 converged / verified / all schedule conditions pass,
//! 1 input error, 2 iteration budget exhausted (or verification or
//! schedule check failed), 3 diverged, 4 no oracle for the family.

pub mod commands;
pub mod problem;

use fixpoint_vi::Error;
use thiserror::Error as ThisError;

pub use problem::ProblemFile;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_MAX_ITER: i32 = 2;
pub const EXIT_DIVERGED: i32 = 3;
pub const EXIT_UNSUPPORTED: i32 = 4;

#[derive(Debug, ThisError)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Unsupported(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::Io(_) => EXIT_INPUT,
            CliError::Unsupported(_) => EXIT_UNSUPPORTED,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Unsupported(_) => CliError::Unsupported(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}
