//! Command-line front end: config parsing, experiment dispatch, CSV output.

mod config;
mod experiments;
mod report;

pub use config::{
    Experiment, ExperimentConfig, FunctionSpec, Grids, OperatorConfig, Piece, RatesConfig,
    Tolerances, VoronovskajaConfig,
};
pub use experiments::{run, RunOutput};
pub use report::{describe, fmt_sig, Cell, Report};

use thiserror::Error;

use crate::appell::AppellError;
use crate::engine::EngineError;
use crate::kernel::KernelError;

/// Failure with a process exit code: 1 config, 2 bound violation,
/// 3 validation, 4 numerical non-convergence.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("bound violation: {0}")]
    BoundViolation(String),
    #[error("validation failure: {0}")]
    Validation(String),
    #[error("numerical non-convergence: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::BoundViolation(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

pub(crate) fn engine_error(e: EngineError) -> CliError {
    match e {
        EngineError::Appell(a) => match a {
            AppellError::InvalidPair(_) | AppellError::NegativeWeight { .. } => {
                CliError::Validation(a.to_string())
            }
            AppellError::HorizonExceeded { .. } => CliError::Numerical(a.to_string()),
            AppellError::BadPoint { .. } => CliError::Config(a.to_string()),
        },
        EngineError::Kernel(k) => match k {
            KernelError::BadParams { .. } | KernelError::BadIndex | KernelError::BadPoint { .. } => {
                CliError::Config(k.to_string())
            }
            divergent => CliError::Numerical(divergent.to_string()),
        },
        EngineError::Numerics(n) => CliError::Numerical(n.to_string()),
        outside @ EngineError::OutsideGrid { .. } => CliError::Numerical(outside.to_string()),
    }
}
