//! The delayed-feedback bandit environment.
//!
//! Each round the agent pulls an arm, the environment draws a Bernoulli
//! reward and a delay, and schedules the `(arm, reward)` pair for reveal at
//! `pull_round + delay`. [`Environment::step`] then returns every pair due in
//! the current round, including the one just pulled when its delay is zero.
//! Pairs never carry pull times or delay values.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::Rng;
use thiserror::Error;

use crate::delay::{Delay, DelayError, DelayModel};
use crate::rng::{substream, SimRng, Stream};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("a bandit needs at least two arms, got {0}")]
    TooFewArms(usize),
    #[error("mean of arm {arm} is {mean}, outside [0, 1]")]
    MeanOutOfRange { arm: usize, mean: f64 },
    #[error("the optimal arm is not unique (maximum mean {0} is attained more than once)")]
    NoUniqueOptimum(f64),
    #[error("arm {arm} out of range for a bandit with {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },
    #[error("horizon {0} already reached")]
    HorizonReached(u64),
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error(transparent)]
    Delay(#[from] DelayError),
}

/// Bernoulli bandit with a unique optimal arm. Hidden from policies.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    means: Vec<f64>,
    optimal: usize,
    gaps: Vec<f64>,
}

impl BanditInstance {
    pub fn new(means: Vec<f64>) -> Result<Self, EnvError> {
        if means.len() < 2 {
            return Err(EnvError::TooFewArms(means.len()));
        }
        if let Some((arm, &mean)) = means
            .iter()
            .enumerate()
            .find(|(_, m)| !(0.0..=1.0).contains(*m))
        {
            return Err(EnvError::MeanOutOfRange { arm, mean });
        }
        let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut winners = means.iter().enumerate().filter(|(_, m)| **m == best);
        let optimal = winners.next().map(|(i, _)| i).unwrap_or_default();
        if winners.next().is_some() {
            return Err(EnvError::NoUniqueOptimum(best));
        }
        let gaps = means.iter().map(|m| best - m).collect();
        Ok(Self {
            means,
            optimal,
            gaps,
        })
    }

    pub fn arms(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn optimal_arm(&self) -> usize {
        self.optimal
    }

    /// `max_j μ_j − μ_i` for every arm.
    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn gap(&self, arm: usize) -> f64 {
        self.gaps[arm]
    }
}

/// A scheduled reveal. Ordering is by reveal round, then pull round, then arm,
/// which is also the delivery order inside a batch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PendingReveal {
    pub reveal_round: u64,
    pub pull_round: u64,
    pub arm: usize,
    pub reward: bool,
}

/// One revealed `(arm, reward)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Observation {
    pub arm: usize,
    pub reward: bool,
}

/// The pairs revealed in one round.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeedbackBatch {
    items: Vec<Observation>,
}

impl FeedbackBatch {
    pub fn new(items: Vec<Observation>) -> Self {
        Self { items }
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Observation> {
        self.items.iter()
    }

    pub fn as_slice(&self) -> &[Observation] {
        &self.items
    }
}

impl FromIterator<(usize, bool)> for FeedbackBatch {
    fn from_iter<I: IntoIterator<Item = (usize, bool)>>(iter: I) -> Self {
        Self {
            items: iter
                .into_iter()
                .map(|(arm, reward)| Observation { arm, reward })
                .collect(),
        }
    }
}

/// Bookkeeping of where every pull ended up.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RevealStats {
    pub pulls: u64,
    pub delivered: u64,
    /// Pulls whose delay was infinite.
    pub lost: u64,
    /// Pulls whose reveal round falls after the horizon; dropped on arrival.
    pub beyond_horizon: u64,
}

/// Environment state for a single run.
#[derive(Debug, Clone)]
pub struct Environment {
    instance: BanditInstance,
    delays: DelayModel,
    horizon: u64,
    round: u64,
    pending: BinaryHeap<Reverse<PendingReveal>>,
    reward_rng: SimRng,
    delay_rng: SimRng,
    queue_clocks: Vec<f64>,
    stats: RevealStats,
}

impl Environment {
    /// Fresh environment at round 1 with reward and delay streams derived
    /// from `seed`.
    pub fn new(
        instance: BanditInstance,
        delays: DelayModel,
        horizon: u64,
        seed: u64,
    ) -> Result<Self, EnvError> {
        if horizon == 0 {
            return Err(EnvError::ZeroHorizon);
        }
        delays.validate(instance.arms())?;
        let arms = instance.arms();
        Ok(Self {
            instance,
            delays,
            horizon,
            round: 1,
            pending: BinaryHeap::new(),
            reward_rng: substream(seed, Stream::Rewards),
            delay_rng: substream(seed, Stream::Delays),
            queue_clocks: vec![0.0; arms],
            stats: RevealStats::default(),
        })
    }

    /// Restarts at round 1 with new streams; instance and delays are kept.
    pub fn reset(&mut self, seed: u64) {
        self.round = 1;
        self.pending.clear();
        self.reward_rng = substream(seed, Stream::Rewards);
        self.delay_rng = substream(seed, Stream::Delays);
        self.queue_clocks.iter_mut().for_each(|c| *c = 0.0);
        self.stats = RevealStats::default();
    }

    /// Plays `arm` in the current round and returns everything revealed in it.
    pub fn step(&mut self, arm: usize) -> Result<FeedbackBatch, EnvError> {
        let arms = self.instance.arms();
        if arm >= arms {
            return Err(EnvError::ArmOutOfRange { arm, arms });
        }
        if self.round > self.horizon {
            return Err(EnvError::HorizonReached(self.horizon));
        }
        let t = self.round;
        let reward = self.reward_rng.random::<f64>() < self.instance.means[arm];
        let delay = self
            .delays
            .sample(arm, t, &mut self.queue_clocks, &mut self.delay_rng);
        self.stats.pulls += 1;
        match delay {
            Delay::Infinite => self.stats.lost += 1,
            Delay::Finite(d) => match t.checked_add(d) {
                Some(reveal_round) if reveal_round <= self.horizon => {
                    self.pending.push(Reverse(PendingReveal {
                        reveal_round,
                        pull_round: t,
                        arm,
                        reward,
                    }))
                }
                _ => self.stats.beyond_horizon += 1,
            },
        }

        let mut items = Vec::new();
        while let Some(Reverse(next)) = self.pending.peek() {
            if next.reveal_round > t {
                break;
            }
            let Reverse(due) = self.pending.pop().expect("peeked");
            items.push(Observation {
                arm: due.arm,
                reward: due.reward,
            });
        }
        self.stats.delivered += items.len() as u64;
        self.round += 1;
        Ok(FeedbackBatch { items })
    }

    pub fn instance(&self) -> &BanditInstance {
        &self.instance
    }

    pub fn delays(&self) -> &DelayModel {
        &self.delays
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// The round the next call to [`Environment::step`] will play.
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn pending_len(&self) -> usize {
        self.pending.len()
    }

    /// Earliest scheduled reveal, if any.
    pub fn next_reveal_round(&self) -> Option<u64> {
        self.pending.peek().map(|Reverse(p)| p.reveal_round)
    }

    pub fn stats(&self) -> RevealStats {
        self.stats
    }
}
