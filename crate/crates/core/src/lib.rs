//! Stochastic multi-armed bandits with delayed feedback.
//!
//! * [`env`]: the round-by-round protocol. Rewards are drawn on pull and
//!   revealed after a random delay, possibly never.
//! * [`delay`]: fixed, Pareto, packet-loss, geometric, uniform and
//!   queue-based delays, with exact quantiles for the i.i.d. families.
//! * [`policy`]: Thompson sampling, Delayed-UCB1 and successive elimination
//!   behind the [`policy::Policy`] trait.
//! * [`bounds`]: quantile-based regret bound evaluators and a Monte Carlo
//!   check of the reveal-count concentration inequality.
//! * [`harness`]: built-in scenarios, parallel deterministic replications,
//!   pseudo-regret aggregation and CSV output.

pub mod bounds;
pub mod delay;
pub mod env;
pub mod harness;
pub mod policy;
pub mod rng;

pub use delay::{Delay, DelayModel};
pub use env::{BanditInstance, Environment, FeedbackBatch, Observation};
pub use policy::{Policy, PolicyKind};
