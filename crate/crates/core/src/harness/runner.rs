use serde::Serialize;

use super::config::ScenarioConfig;
use super::HarnessError;
use crate::delay::DelayModel;
use crate::env::{BanditInstance, Environment};
use crate::policy::{Policy, PolicyKind};
use crate::rng::{replication_seed, substream, Stream};

/// One policy on one replication.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub policy: String,
    pub replication: usize,
    /// Cumulative pseudo-regret after rounds `1..=T`: the sum of the gaps of
    /// the arms pulled so far.
    pub regret: Vec<f64>,
    pub means: Vec<f64>,
    pub delays: DelayModel,
}

impl RunResult {
    pub fn final_regret(&self) -> f64 {
        self.regret.last().copied().unwrap_or(0.0)
    }
}

/// Cross-replication summary of one policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateResult {
    pub policy: String,
    pub replications: usize,
    pub mean: Vec<f64>,
    /// Sample standard deviation over `sqrt(R)`; zero when `R = 1`.
    pub stderr: Vec<f64>,
}

impl AggregateResult {
    pub fn from_runs(policy: &str, runs: &[RunResult]) -> Self {
        let r = runs.len();
        let horizon = runs.first().map_or(0, |run| run.regret.len());
        let mut mean = vec![0.0; horizon];
        let mut stderr = vec![0.0; horizon];
        for t in 0..horizon {
            let m = runs.iter().map(|run| run.regret[t]).sum::<f64>() / r as f64;
            mean[t] = m;
            if r > 1 {
                let var = runs
                    .iter()
                    .map(|run| (run.regret[t] - m).powi(2))
                    .sum::<f64>()
                    / (r - 1) as f64;
                stderr[t] = (var / r as f64).sqrt();
            }
        }
        Self {
            policy: policy.to_string(),
            replications: r,
            mean,
            stderr,
        }
    }

    pub fn final_mean(&self) -> f64 {
        self.mean.last().copied().unwrap_or(0.0)
    }

    pub fn final_stderr(&self) -> f64 {
        self.stderr.last().copied().unwrap_or(0.0)
    }
}

/// Everything a scenario run produced.
#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    /// One entry per policy, in config order.
    pub aggregates: Vec<AggregateResult>,
    /// Realized instance and delays per replication (shared by all policies).
    pub realized: Vec<(Vec<f64>, DelayModel)>,
}

impl ScenarioResult {
    pub fn aggregate(&self, policy: PolicyKind) -> Option<&AggregateResult> {
        self.aggregates.iter().find(|a| a.policy == policy.as_str())
    }
}

/// The instance and delay model replication `index` runs on.
pub fn realize_replication(
    config: &ScenarioConfig,
    index: usize,
) -> Result<(BanditInstance, DelayModel), HarnessError> {
    let seed = replication_seed(config.seed, index as u64);
    config.realize(&mut substream(seed, Stream::Instance))
}

/// Runs an arbitrary policy on replication `index` of `config`.
pub fn run_replication_with(
    config: &ScenarioConfig,
    index: usize,
    policy: &mut dyn Policy,
) -> Result<RunResult, HarnessError> {
    let seed = replication_seed(config.seed, index as u64);
    let (instance, delays) = config.realize(&mut substream(seed, Stream::Instance))?;
    if policy.arms() != instance.arms() {
        return Err(HarnessError::config(format!(
            "policy has {} arms, instance has {}",
            policy.arms(),
            instance.arms()
        )));
    }
    let means = instance.means().to_vec();
    let gaps = instance.gaps().to_vec();
    let mut env = Environment::new(instance, delays.clone(), config.horizon, seed)?;
    let mut rng = substream(seed, Stream::Policy);

    let mut regret = Vec::with_capacity(config.horizon as usize);
    let mut total = 0.0;
    for t in 1..=config.horizon {
        let arm = policy.select(t, &mut rng);
        let batch = env.step(arm)?;
        total += gaps[arm];
        regret.push(total);
        policy.observe(&batch)?;
    }
    Ok(RunResult {
        policy: policy.name().to_string(),
        replication: index,
        regret,
        means,
        delays,
    })
}

/// Runs a built-in policy on replication `index` of `config`.
pub fn run_replication(
    config: &ScenarioConfig,
    policy: PolicyKind,
    index: usize,
) -> Result<RunResult, HarnessError> {
    run_replication_with(config, index, policy.build(config.arms).as_mut())
}

/// Runs every (policy, replication) pair and aggregates per policy.
///
/// `workers` bounds the thread count (`None`: all cores). Results are
/// collected in (policy, replication) order, so the output does not depend
/// on the degree of parallelism.
pub fn run_scenario(
    config: &ScenarioConfig,
    workers: Option<usize>,
) -> Result<ScenarioResult, HarnessError> {
    config.validate()?;
    let jobs: Vec<(PolicyKind, usize)> = config
        .policies
        .iter()
        .flat_map(|&p| (0..config.replications).map(move |r| (p, r)))
        .collect();
    let runs = execute(&jobs, workers, |&(policy, rep)| {
        run_replication(config, policy, rep)
    })?;

    let aggregates = config
        .policies
        .iter()
        .zip(runs.chunks(config.replications))
        .map(|(policy, chunk)| AggregateResult::from_runs(policy.as_str(), chunk))
        .collect();
    let realized = runs
        .iter()
        .take(config.replications)
        .map(|r| (r.means.clone(), r.delays.clone()))
        .collect();
    Ok(ScenarioResult {
        config: config.clone(),
        aggregates,
        realized,
    })
}

#[cfg(feature = "parallel")]
fn execute<J, F>(jobs: &[J], workers: Option<usize>, f: F) -> Result<Vec<RunResult>, HarnessError>
where
    J: Sync,
    F: Fn(&J) -> Result<RunResult, HarnessError> + Sync,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Runtime(e.to_string()))?;
    pool.install(|| jobs.par_iter().map(&f).collect())
}

#[cfg(not(feature = "parallel"))]
fn execute<J, F>(jobs: &[J], _workers: Option<usize>, f: F) -> Result<Vec<RunResult>, HarnessError>
where
    F: Fn(&J) -> Result<RunResult, HarnessError>,
{
    jobs.iter().map(f).collect()
}
