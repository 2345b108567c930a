use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::delay::DelayModel;
use crate::env::BanditInstance;
use crate::policy::PolicyKind;
use crate::rng::SimRng;

/// Per-arm values given explicitly or drawn i.i.d. uniform on `[low, high]`
/// once per replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArmValues {
    Explicit { values: Vec<f64> },
    Uniform { low: f64, high: f64 },
}

impl ArmValues {
    fn validate(&self, what: &str, arms: usize) -> Result<(), HarnessError> {
        match self {
            ArmValues::Explicit { values } => {
                if values.len() != arms {
                    return Err(HarnessError::config(format!(
                        "{what}: {} values for {arms} arms",
                        values.len()
                    )));
                }
                if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                    return Err(HarnessError::config(format!(
                        "{what}: value {v} outside [0, 1]"
                    )));
                }
            }
            ArmValues::Uniform { low, high } => {
                if !(0.0 <= *low && low <= high && *high <= 1.0) {
                    return Err(HarnessError::config(format!(
                        "{what}: interval [{low}, {high}] is not inside [0, 1]"
                    )));
                }
            }
        }
        Ok(())
    }

    fn draw(&self, arms: usize, rng: &mut SimRng) -> Vec<f64> {
        match self {
            ArmValues::Explicit { values } => values.clone(),
            ArmValues::Uniform { low, high } => (0..arms)
                .map(|_| low + (high - low) * rng.random::<f64>())
                .collect(),
        }
    }
}

/// Delay configuration. Mirrors [`DelayModel`] except that packet-loss
/// probabilities may be drawn per replication.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DelaySpec {
    Fixed { delay: u64 },
    Pareto { alpha: Vec<f64> },
    PacketLoss { p: ArmValues },
    Geometric { p: f64 },
    Uniform { low: u64, high: u64 },
    Queue { service_rate: f64 },
}

impl DelaySpec {
    fn resolve(&self, arms: usize, rng: &mut SimRng) -> DelayModel {
        self.model_with(|p| p.draw(arms, rng))
    }

    fn model_with<F: FnOnce(&ArmValues) -> Vec<f64>>(&self, packet_loss: F) -> DelayModel {
        match self {
            DelaySpec::Fixed { delay } => DelayModel::Fixed { delay: *delay },
            DelaySpec::Pareto { alpha } => DelayModel::Pareto {
                alpha: alpha.clone(),
            },
            DelaySpec::PacketLoss { p } => DelayModel::PacketLoss { p: packet_loss(p) },
            DelaySpec::Geometric { p } => DelayModel::Geometric { p: *p },
            DelaySpec::Uniform { low, high } => DelayModel::Uniform {
                low: *low,
                high: *high,
            },
            DelaySpec::Queue { service_rate } => DelayModel::Queue {
                service_rate: *service_rate,
            },
        }
    }

    fn validate(&self, arms: usize) -> Result<(), HarnessError> {
        if let DelaySpec::PacketLoss { p } = self {
            p.validate("packet-loss p", arms)?;
        }
        // Sampled packet-loss probabilities are range-checked above.
        self.model_with(|_| vec![0.5; arms])
            .validate(arms)
            .map_err(|e| HarnessError::config(e.to_string()))
    }
}

/// A complete experiment description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub arms: usize,
    pub means: ArmValues,
    pub delay: DelaySpec,
    pub horizon: u64,
    pub replications: usize,
    pub policies: Vec<PolicyKind>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
        {
            return Err(HarnessError::config(format!(
                "scenario name {:?} must be non-empty and use only [A-Za-z0-9_-]",
                self.name
            )));
        }
        if self.arms < 2 {
            return Err(HarnessError::config(format!(
                "need at least 2 arms, got {}",
                self.arms
            )));
        }
        if self.horizon < 1 {
            return Err(HarnessError::config("horizon must be at least 1"));
        }
        if self.replications < 1 {
            return Err(HarnessError::config("replications must be at least 1"));
        }
        if self.policies.is_empty() {
            return Err(HarnessError::config("no policies given"));
        }
        self.means.validate("means", self.arms)?;
        match &self.means {
            ArmValues::Explicit { values } => {
                BanditInstance::new(values.clone())
                    .map_err(|e| HarnessError::config(e.to_string()))?;
            }
            ArmValues::Uniform { low, high } if low >= high => {
                return Err(HarnessError::config(
                    "sampled means need low < high for a unique optimum",
                ));
            }
            ArmValues::Uniform { .. } => {}
        }
        self.delay.validate(self.arms)
    }

    /// Reads a JSON config file.
    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        let config: ScenarioConfig = serde_json::from_str(&text)
            .map_err(|e| HarnessError::config(format!("{}: {e}", path.display())))?;
        config.validate()?;
        Ok(config)
    }

    /// Draws the replication's instance and delay model from the instance
    /// substream. Sampled means are redrawn until the optimum is unique.
    pub fn realize(&self, rng: &mut SimRng) -> Result<(BanditInstance, DelayModel), HarnessError> {
        let instance = loop {
            match BanditInstance::new(self.means.draw(self.arms, rng)) {
                Ok(instance) => break instance,
                Err(e) if matches!(self.means, ArmValues::Explicit { .. }) => {
                    return Err(HarnessError::config(e.to_string()))
                }
                Err(_) => continue,
            }
        };
        let delays = self.delay.resolve(self.arms, rng);
        Ok((instance, delays))
    }
}
