//! CSV and metadata writers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ScenarioConfig;
use super::runner::ScenarioResult;
use super::HarnessError;
use crate::bounds::BoundValue;
use crate::delay::DelayModel;

pub const CSV_HEADER: [&str; 6] = [
    "scenario",
    "policy",
    "round",
    "mean_regret",
    "stderr",
    "replications",
];

/// Rounds written to the CSV: every `max(1, T/1000)`-th round plus the last.
pub fn output_rounds(horizon: u64) -> impl Iterator<Item = u64> {
    let stride = (horizon / 1000).max(1);
    (1..=horizon).filter(move |t| t % stride == 0 || *t == horizon)
}

#[derive(Serialize)]
struct Row<'a> {
    scenario: &'a str,
    policy: &'a str,
    round: u64,
    mean_regret: f64,
    stderr: f64,
    replications: usize,
}

/// Renders the regret CSV of a scenario result.
pub fn regret_csv(result: &ScenarioResult) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    let scenario = result.config.name.as_str();
    for agg in &result.aggregates {
        for t in output_rounds(result.config.horizon) {
            let i = (t - 1) as usize;
            w.serialize(Row {
                scenario,
                policy: &agg.policy,
                round: t,
                mean_regret: agg.mean[i],
                stderr: agg.stderr[i],
                replications: agg.replications,
            })?;
        }
    }
    w.into_inner()
        .map_err(|e| HarnessError::Runtime(e.to_string()))
}

#[derive(Serialize)]
struct Metadata<'a> {
    scenario: &'a str,
    config: &'a ScenarioConfig,
    seed: u64,
    regret: &'static str,
    csv_stride: u64,
    realized: Vec<RealizedReplication<'a>>,
}

#[derive(Serialize)]
struct RealizedReplication<'a> {
    replication: usize,
    means: &'a [f64],
    delays: &'a DelayModel,
}

/// Renders the sidecar metadata (resolved config, seed, realized instances).
pub fn metadata_json(result: &ScenarioResult) -> Result<Vec<u8>, HarnessError> {
    let meta = Metadata {
        scenario: &result.config.name,
        config: &result.config,
        seed: result.config.seed,
        regret: "pseudo-regret: cumulative sum of the gaps of the pulled arms",
        csv_stride: (result.config.horizon / 1000).max(1),
        realized: result
            .realized
            .iter()
            .enumerate()
            .map(|(replication, (means, delays))| RealizedReplication {
                replication,
                means,
                delays,
            })
            .collect(),
    };
    serde_json::to_vec_pretty(&meta).map_err(|e| HarnessError::Runtime(e.to_string()))
}

/// Writes `<dir>/<scenario>.csv` and `<dir>/<scenario>.meta.json`.
/// Returns the CSV path.
pub fn write_scenario(dir: &Path, result: &ScenarioResult) -> Result<PathBuf, HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let csv_path = dir.join(format!("{}.csv", result.config.name));
    write(&csv_path, &regret_csv(result)?)?;
    let meta_path = dir.join(format!("{}.meta.json", result.config.name));
    write(&meta_path, &metadata_json(result)?)?;
    Ok(csv_path)
}

/// One row of the bounds table.
#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub scenario: String,
    pub bound: String,
    pub value: f64,
    /// Minimizing levels per arm, `;`-separated.
    pub q_star: String,
}

impl BoundRow {
    pub fn new(scenario: &str, value: &BoundValue) -> Self {
        Self {
            scenario: scenario.to_string(),
            bound: value.kind.name().to_string(),
            value: value.value,
            q_star: value
                .q_star
                .iter()
                .map(|q| format!("{q}"))
                .collect::<Vec<_>>()
                .join(";"),
        }
    }
}

pub fn bounds_csv(rows: &[BoundRow]) -> Result<Vec<u8>, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    w.into_inner()
        .map_err(|e| HarnessError::Runtime(e.to_string()))
}

/// Writes `<dir>/<scenario>_bounds.csv`.
pub fn write_bounds(
    dir: &Path,
    scenario: &str,
    rows: &[BoundRow],
) -> Result<PathBuf, HarnessError> {
    fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
    let path = dir.join(format!("{scenario}_bounds.csv"));
    write(&path, &bounds_csv(rows)?)?;
    Ok(path)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    fs::write(path, bytes).map_err(|e| HarnessError::io(path, e))
}
