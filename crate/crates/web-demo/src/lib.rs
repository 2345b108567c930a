//! WebAssembly bindings for the browser demo.
//!
//! Every export takes JSON and returns JSON so the page needs no generated
//! type glue. Non-finite numbers (infinite delays or bounds) come back as
//! `null`. The `*_json` functions are the plain-Rust implementations.

use serde::{Deserialize, Serialize};
use wasm_bindgen::prelude::*;

use delayed_bandits::bounds::{minimize_bound, BoundInput, BoundKind, BoundValue, QGrid};
use delayed_bandits::harness::{run_scenario, ScenarioConfig};
use delayed_bandits::rng::{substream, Stream};
use delayed_bandits::{BanditInstance, Delay, DelayModel};

/// Upper limit on `policies × replications × horizon` per simulation call.
pub const MAX_SIMULATED_PULLS: u64 = 20_000_000;
/// Upper limit on delay samples per histogram call.
pub const MAX_DELAY_SAMPLES: usize = 1_000_000;
/// Number of points per regret curve sent back to the page.
const CURVE_POINTS: u64 = 200;

#[derive(Serialize)]
struct Curve {
    policy: String,
    rounds: Vec<u64>,
    mean: Vec<f64>,
    stderr: Vec<f64>,
}

#[derive(Serialize)]
struct Simulation {
    scenario: String,
    horizon: u64,
    replications: usize,
    curves: Vec<Curve>,
}

/// Runs a scenario config and returns downsampled regret curves.
pub fn simulate_json(config: &str) -> Result<String, String> {
    let config: ScenarioConfig = serde_json::from_str(config).map_err(|e| e.to_string())?;
    let pulls = (config.policies.len() as u64)
        .saturating_mul(config.replications as u64)
        .saturating_mul(config.horizon);
    if pulls > MAX_SIMULATED_PULLS {
        return Err(format!(
            "{pulls} simulated pulls exceed the demo limit of {MAX_SIMULATED_PULLS}"
        ));
    }
    let result = run_scenario(&config, None).map_err(|e| e.to_string())?;
    let stride = (config.horizon / CURVE_POINTS).max(1);
    let rounds: Vec<u64> = (1..=config.horizon)
        .filter(|t| t % stride == 0 || *t == config.horizon)
        .collect();
    let curves = result
        .aggregates
        .iter()
        .map(|a| Curve {
            policy: a.policy.clone(),
            rounds: rounds.clone(),
            mean: rounds.iter().map(|&t| a.mean[t as usize - 1]).collect(),
            stderr: rounds.iter().map(|&t| a.stderr[t as usize - 1]).collect(),
        })
        .collect();
    to_json(&Simulation {
        scenario: config.name,
        horizon: config.horizon,
        replications: config.replications,
        curves,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileRequest {
    delay: DelayModel,
    arms: usize,
    arm: usize,
    samples: usize,
    bins: usize,
    seed: u64,
}

#[derive(Serialize)]
struct QuantilePoint {
    q: f64,
    exact: Option<f64>,
    empirical: Option<f64>,
}

#[derive(Serialize)]
struct DelayProfile {
    family: &'static str,
    samples: usize,
    lost: usize,
    /// Upper edges of the histogram bins (inclusive, integer delays).
    bin_edges: Vec<u64>,
    counts: Vec<usize>,
    /// Whether draws past the last edge were folded into the last bin.
    clipped: bool,
    quantiles: Vec<QuantilePoint>,
}

/// Samples delays of one arm and reports a histogram and quantiles.
///
/// Queue delays depend on the pull schedule; they are sampled as if the arm
/// were pulled once per round, and no exact quantiles are reported.
pub fn delay_profile_json(request: &str) -> Result<String, String> {
    let req: ProfileRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    req.delay.validate(req.arms).map_err(|e| e.to_string())?;
    if req.arm >= req.arms {
        return Err(format!(
            "arm {} out of range for {} arms",
            req.arm, req.arms
        ));
    }
    if req.samples == 0 || req.samples > MAX_DELAY_SAMPLES {
        return Err(format!("samples must be in 1..={MAX_DELAY_SAMPLES}"));
    }
    if req.bins == 0 || req.bins > 1000 {
        return Err("bins must be in 1..=1000".into());
    }

    let mut rng = substream(req.seed, Stream::Delays);
    let mut clocks = vec![0.0; req.arms];
    let mut finite: Vec<u64> = (0..req.samples as u64)
        .filter_map(|t| {
            req.delay
                .sample(req.arm, t + 1, &mut clocks, &mut rng)
                .finite()
        })
        .collect();
    finite.sort_unstable();
    let lost = req.samples - finite.len();

    let (bin_edges, counts) = histogram(&finite, req.bins);
    let clipped = bin_edges
        .last()
        .is_some_and(|&e| finite.last().is_some_and(|&m| m > e));
    let quantiles = (1..=19)
        .map(|j| {
            let q = j as f64 / 20.0;
            let exact = req.delay.quantile(req.arm, q).ok().and_then(delay_value);
            // Smallest d with at least ceil(q·n) samples ≤ d; lost samples count as ∞.
            let rank = (q * req.samples as f64).ceil() as usize;
            let empirical = finite.get(rank.max(1) - 1).map(|&d| d as f64);
            QuantilePoint {
                q,
                exact,
                empirical,
            }
        })
        .collect();
    to_json(&DelayProfile {
        family: req.delay.family(),
        samples: req.samples,
        lost,
        bin_edges,
        counts,
        clipped,
        quantiles,
    })
}

fn histogram(sorted: &[u64], bins: usize) -> (Vec<u64>, Vec<usize>) {
    let Some(&max) = sorted.last() else {
        return (Vec::new(), Vec::new());
    };
    // Clip the tail at the 99th percentile so heavy tails stay readable.
    let clip = sorted[(sorted.len() * 99 / 100).min(sorted.len() - 1)].max(sorted[0]);
    let top = if max > clip.max(1).saturating_mul(4) {
        clip
    } else {
        max
    };
    let width = (top / bins as u64 + 1).max(1);
    let n = (top / width + 1) as usize;
    let edges = (1..=n as u64).map(|i| i * width - 1).collect();
    let mut counts = vec![0; n];
    for &d in sorted {
        counts[((d / width) as usize).min(n - 1)] += 1;
    }
    (edges, counts)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundRequest {
    means: Vec<f64>,
    delay: DelayModel,
    horizon: u64,
}

#[derive(Serialize)]
struct BoundReport {
    optimal_arm: usize,
    gaps: Vec<f64>,
    bounds: Vec<BoundValue>,
}

/// Minimizes the Thompson sampling and successive-elimination bounds.
pub fn bounds_json(request: &str) -> Result<String, String> {
    let req: BoundRequest = serde_json::from_str(request).map_err(|e| e.to_string())?;
    let instance = BanditInstance::new(req.means).map_err(|e| e.to_string())?;
    req.delay
        .validate(instance.arms())
        .map_err(|e| e.to_string())?;
    let input = BoundInput::new(&instance, req.delay, req.horizon).map_err(|e| e.to_string())?;
    let grid = QGrid::default();
    let bounds = [
        BoundKind::thompson_for(instance.arms()),
        BoundKind::SuccessiveElimination,
    ]
    .into_iter()
    .map(|kind| minimize_bound(kind, &input, &grid).map_err(|e| e.to_string()))
    .collect::<Result<Vec<_>, _>>()?;
    to_json(&BoundReport {
        optimal_arm: instance.optimal_arm(),
        gaps: instance.gaps().to_vec(),
        bounds,
    })
}

fn delay_value(d: Delay) -> Option<f64> {
    d.finite().map(|v| v as f64)
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

#[wasm_bindgen]
pub fn simulate(config: &str) -> Result<String, JsError> {
    simulate_json(config).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = delayProfile)]
pub fn delay_profile(request: &str) -> Result<String, JsError> {
    delay_profile_json(request).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = minimizeBounds)]
pub fn minimize_bounds(request: &str) -> Result<String, JsError> {
    bounds_json(request).map_err(|e| JsError::new(&e))
}
