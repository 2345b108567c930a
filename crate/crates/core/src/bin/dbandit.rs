use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use delayed_bandits::bounds::QGrid;
use delayed_bandits::harness::{
    resolve_scenario, run_scenario, scenario_bounds, scenario_registry, write_bounds,
    write_scenario, HarnessError, ScenarioConfig,
};
use delayed_bandits::PolicyKind;

/// Delayed-feedback bandit experiments.
#[derive(Parser)]
#[command(name = "dbandit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate policies on a scenario and write the regret CSV.
    Run {
        /// Built-in scenario name or path to a JSON config.
        #[arg(long)]
        scenario: String,
        /// Comma-separated subset of ts, se, ducb1.
        #[arg(long, value_delimiter = ',')]
        policies: Option<Vec<PolicyKind>>,
        #[arg(long)]
        reps: Option<usize>,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (default: all cores). Does not affect the output.
        #[arg(long)]
        workers: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Minimize the quantile-based regret bounds for a scenario.
    Bounds {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        horizon: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the built-in scenarios.
    ListScenarios,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Run {
            scenario,
            policies,
            reps,
            horizon,
            seed,
            workers,
            out,
        } => {
            let mut config = resolve_scenario(&scenario)?;
            if let Some(p) = policies {
                config.policies = p;
            }
            override_common(&mut config, reps, horizon, seed);
            if workers == Some(0) {
                return Err(HarnessError::config("--workers must be positive"));
            }
            let out = out
                .or_else(|| config.output.clone())
                .ok_or_else(|| HarnessError::config("--out is required"))?;
            let result = run_scenario(&config, workers)?;
            let path = write_scenario(&out, &result)?;
            for agg in &result.aggregates {
                println!(
                    "{:>6}  regret {:>10.2} ± {:.2}  ({} reps, T = {})",
                    agg.policy,
                    agg.final_mean(),
                    agg.final_stderr(),
                    agg.replications,
                    config.horizon
                );
            }
            println!("wrote {}", path.display());
        }
        Command::Bounds {
            scenario,
            horizon,
            out,
        } => {
            let mut config = resolve_scenario(&scenario)?;
            override_common(&mut config, None, horizon, None);
            let rows = scenario_bounds(&config, &QGrid::default())?;
            for row in &rows {
                println!(
                    "{:>20}  {:>14.3}  q* = {}",
                    row.bound, row.value, row.q_star
                );
            }
            let path = write_bounds(&out, &config.name, &rows)?;
            println!("wrote {}", path.display());
        }
        Command::ListScenarios => {
            for c in scenario_registry() {
                println!(
                    "{:<12} K={:<3} T={:<6} R={:<4} delay={}",
                    c.name,
                    c.arms,
                    c.horizon,
                    c.replications,
                    serde_json::to_string(&c.delay).unwrap_or_default()
                );
            }
        }
    }
    Ok(())
}

fn override_common(
    config: &mut ScenarioConfig,
    reps: Option<usize>,
    horizon: Option<u64>,
    seed: Option<u64>,
) {
    if let Some(r) = reps {
        config.replications = r;
    }
    if let Some(t) = horizon {
        config.horizon = t;
    }
    if let Some(s) = seed {
        config.seed = s;
    }
}
