//! Delay-agnostic bandit policies.
//!
//! A policy only ever sees the round index and the `(arm, reward)` pairs the
//! environment reveals. It never learns delays, pull times, or means.

mod elimination;
mod thompson;
mod ucb;

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::FeedbackBatch;
use crate::rng::SimRng;

pub use elimination::SuccessiveElimination;
pub use thompson::ThompsonSampling;
pub use ucb::DelayedUcb1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolicyError {
    #[error("observed arm {arm} but the policy has {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },
    #[error("unknown policy {0:?} (expected ts, ducb1 or se)")]
    UnknownPolicy(String),
}

/// Arm selection from revealed feedback only.
///
/// Implementations must be order-insensitive within a batch. Additional
/// algorithms plug in by implementing this trait; any oracle knowledge they
/// need (e.g. a known delay CDF) is given at construction.
pub trait Policy: Send {
    fn name(&self) -> &str;

    fn arms(&self) -> usize;

    /// Chooses the arm for round `round` (1-based).
    fn select(&mut self, round: u64, rng: &mut SimRng) -> usize;

    /// Ingests the pairs revealed in the last round.
    fn observe(&mut self, batch: &FeedbackBatch) -> Result<(), PolicyError>;

    /// Total number of rewards observed so far, across arms.
    fn observed(&self) -> u64;
}

/// The built-in policies, by their configuration names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PolicyKind {
    #[serde(rename = "ts")]
    Thompson,
    #[serde(rename = "ducb1")]
    DelayedUcb1,
    #[serde(rename = "se")]
    SuccessiveElimination,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 3] = [
        PolicyKind::Thompson,
        PolicyKind::SuccessiveElimination,
        PolicyKind::DelayedUcb1,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PolicyKind::Thompson => "ts",
            PolicyKind::DelayedUcb1 => "ducb1",
            PolicyKind::SuccessiveElimination => "se",
        }
    }

    pub fn build(self, arms: usize) -> Box<dyn Policy> {
        match self {
            PolicyKind::Thompson => Box::new(ThompsonSampling::new(arms)),
            PolicyKind::DelayedUcb1 => Box::new(DelayedUcb1::new(arms)),
            PolicyKind::SuccessiveElimination => Box::new(SuccessiveElimination::new(arms)),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PolicyKind {
    type Err = PolicyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "ts" => Ok(PolicyKind::Thompson),
            "ducb1" => Ok(PolicyKind::DelayedUcb1),
            "se" => Ok(PolicyKind::SuccessiveElimination),
            other => Err(PolicyError::UnknownPolicy(other.to_string())),
        }
    }
}

/// Per-arm observed success/trial counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArmCounts {
    successes: Vec<u64>,
    trials: Vec<u64>,
}

impl ArmCounts {
    pub fn new(arms: usize) -> Self {
        Self {
            successes: vec![0; arms],
            trials: vec![0; arms],
        }
    }

    pub fn arms(&self) -> usize {
        self.trials.len()
    }

    /// Adds a batch. The batch is validated first so a bad arm index leaves
    /// the counts untouched.
    pub fn record(&mut self, batch: &FeedbackBatch) -> Result<(), PolicyError> {
        let arms = self.arms();
        if let Some(o) = batch.iter().find(|o| o.arm >= arms) {
            return Err(PolicyError::ArmOutOfRange { arm: o.arm, arms });
        }
        for o in batch.iter() {
            self.trials[o.arm] += 1;
            self.successes[o.arm] += u64::from(o.reward);
        }
        Ok(())
    }

    pub fn successes(&self, arm: usize) -> u64 {
        self.successes[arm]
    }

    pub fn failures(&self, arm: usize) -> u64 {
        self.trials[arm] - self.successes[arm]
    }

    pub fn trials(&self, arm: usize) -> u64 {
        self.trials[arm]
    }

    /// Observed mean reward, 0 for an unobserved arm.
    pub fn mean(&self, arm: usize) -> f64 {
        match self.trials[arm] {
            0 => 0.0,
            n => self.successes[arm] as f64 / n as f64,
        }
    }

    pub fn total(&self) -> u64 {
        self.trials.iter().sum()
    }
}

/// Index of the largest score with uniform tie-breaking.
///
/// Ties are resolved by reservoir sampling, so randomness is consumed only
/// when a tie is actually met.
pub fn argmax_random_tie<I, R>(scores: I, rng: &mut R) -> usize
where
    I: IntoIterator<Item = f64>,
    R: Rng + ?Sized,
{
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    let mut ties = 0u32;
    for (i, s) in scores.into_iter().enumerate() {
        if ties == 0 || s > best_score {
            best = i;
            best_score = s;
            ties = 1;
        } else if s == best_score {
            ties += 1;
            if rng.random_range(0..ties) == 0 {
                best = i;
            }
        }
    }
    best
}
