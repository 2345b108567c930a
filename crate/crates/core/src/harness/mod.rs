//! Scenario registry, replication runner, aggregation and output.

pub mod config;
pub mod output;
pub mod registry;
pub mod runner;

use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::bounds::{minimize_bound, BoundError, BoundInput, BoundKind, QGrid};
use crate::delay::DelayError;
use crate::env::EnvError;
use crate::policy::PolicyError;

pub use config::{ArmValues, DelaySpec, ScenarioConfig};
pub use output::{write_bounds, write_scenario, BoundRow, CSV_HEADER};
pub use registry::{resolve_scenario, scenario, scenario_registry};
pub use runner::{
    realize_replication, run_replication, run_replication_with, run_scenario, AggregateResult,
    RunResult, ScenarioResult,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Bound(#[from] BoundError),
    #[error("{0}")]
    Runtime(String),
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// Process exit code: 1 for configuration problems, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Bound(BoundError::Delay(DelayError::Unsupported(_))) => 1,
            _ => 2,
        }
    }
}

/// Minimized Thompson sampling and successive-elimination bounds for the
/// instance of replication 0.
pub fn scenario_bounds(
    config: &ScenarioConfig,
    grid: &QGrid,
) -> Result<Vec<BoundRow>, HarnessError> {
    config.validate()?;
    let (instance, delays) = realize_replication(config, 0)?;
    let input = BoundInput::new(&instance, delays, config.horizon.max(2))?;
    [
        BoundKind::thompson_for(instance.arms()),
        BoundKind::SuccessiveElimination,
    ]
    .into_iter()
    .map(|kind| {
        Ok(BoundRow::new(
            &config.name,
            &minimize_bound(kind, &input, grid)?,
        ))
    })
    .collect()
}
