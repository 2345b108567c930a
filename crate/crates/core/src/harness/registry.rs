//! Built-in scenarios.

use std::path::Path;

use super::config::{ArmValues, DelaySpec, ScenarioConfig};
use super::HarnessError;
use crate::policy::PolicyKind;

const DEFAULT_SEED: u64 = 2023;

fn base(
    name: &str,
    arms: usize,
    means: ArmValues,
    delay: DelaySpec,
    horizon: u64,
    replications: usize,
) -> ScenarioConfig {
    ScenarioConfig {
        name: name.to_string(),
        arms,
        means,
        delay,
        horizon,
        replications,
        policies: PolicyKind::ALL.to_vec(),
        seed: DEFAULT_SEED,
        output: None,
    }
}

fn quarter_to_three_quarters() -> ArmValues {
    ArmValues::Uniform {
        low: 0.25,
        high: 0.75,
    }
}

fn pareto(name: &str, alpha2: f64) -> ScenarioConfig {
    base(
        name,
        2,
        ArmValues::Explicit {
            values: vec![0.4, 0.45],
        },
        DelaySpec::Pareto {
            alpha: vec![1.0, alpha2],
        },
        3000,
        300,
    )
}

/// All built-in scenarios, in listing order.
///
/// `pareto` uses `α₂ = 0.5`; the `pareto_a02` / `pareto_a05` / `pareto_a08`
/// variants cover the whole sweep of the optimal arm's tail.
pub fn scenario_registry() -> Vec<ScenarioConfig> {
    vec![
        base(
            "fixed",
            20,
            quarter_to_three_quarters(),
            DelaySpec::Fixed { delay: 250 },
            20_000,
            100,
        ),
        pareto("pareto", 0.5),
        pareto("pareto_a02", 0.2),
        pareto("pareto_a05", 0.5),
        pareto("pareto_a08", 0.8),
        base(
            "packet_loss",
            20,
            quarter_to_three_quarters(),
            DelaySpec::PacketLoss {
                p: ArmValues::Uniform {
                    low: 0.0,
                    high: 1.0,
                },
            },
            10_000,
            200,
        ),
        base(
            "geometric",
            3,
            ArmValues::Explicit {
                values: vec![0.5, 0.4, 0.3],
            },
            DelaySpec::Geometric { p: 0.01 },
            10_000,
            200,
        ),
        base(
            "uniform",
            20,
            quarter_to_three_quarters(),
            DelaySpec::Uniform {
                low: 150,
                high: 300,
            },
            20_000,
            100,
        ),
        base(
            "queue",
            5,
            quarter_to_three_quarters(),
            DelaySpec::Queue { service_rate: 0.1 },
            10_000,
            200,
        ),
    ]
}

/// Looks up a built-in scenario by name.
pub fn scenario(name: &str) -> Result<ScenarioConfig, HarnessError> {
    scenario_registry()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| HarnessError::config(format!("unknown scenario {name:?}")))
}

/// A built-in name, or else a path to a JSON config file.
pub fn resolve_scenario(name_or_path: &str) -> Result<ScenarioConfig, HarnessError> {
    if let Ok(config) = scenario(name_or_path) {
        return Ok(config);
    }
    let path = Path::new(name_or_path);
    if path.is_file() {
        ScenarioConfig::from_path(path)
    } else {
        Err(HarnessError::config(format!(
            "{name_or_path:?} is neither a built-in scenario nor a config file"
        )))
    }
}
