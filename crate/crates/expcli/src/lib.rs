//! Experiment drivers behind the `schmidt-scope` command line: Monte-Carlo
//! surveys, noisy-state threshold scans, single-state certification and
//! the faithfulness activation check.

pub mod activation;
pub mod certify;
pub mod named;
pub mod output;
pub mod scan;
pub mod seed;
pub mod stats;
pub mod survey;

use thiserror::Error;

use schmidt_core::criteria::CriteriaError;
use schmidt_core::qstate::QstateError;
use schmidt_core::witness::WitnessError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("invalid state: {0}")]
    State(#[from] QstateError),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("reproduction failed: {0}")]
    Reproduction(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// 2 for bad input, 3 for solver failures, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) | CliError::State(_) => 2,
            CliError::Solver(_) => 3,
            CliError::Reproduction(_) | CliError::Io(_) => 1,
        }
    }
}

impl From<CriteriaError> for CliError {
    fn from(e: CriteriaError) -> Self {
        match e {
            CriteriaError::InvalidArgument(m) => CliError::Input(m),
            CriteriaError::State(s) => CliError::State(s),
            other => CliError::Solver(other.to_string()),
        }
    }
}

impl From<WitnessError> for CliError {
    fn from(e: WitnessError) -> Self {
        match e {
            WitnessError::State(s) => CliError::State(s),
            other => CliError::Input(other.to_string()),
        }
    }
}

/// Runs `f` on a pool of `workers` threads (all cores when `None`).
pub fn with_workers<T: Send>(workers: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = workers {
        builder = builder.num_threads(n.max(1));
    }
    builder.build().expect("thread pool").install(f)
}
