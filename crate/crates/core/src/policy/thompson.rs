use rand_distr::{Beta, Distribution};

use super::{argmax_random_tie, ArmCounts, Policy, PolicyError};
use crate::env::FeedbackBatch;
use crate::rng::SimRng;

/// Beta-Bernoulli Thompson sampling with a uniform prior.
///
/// The posterior of arm `i` is `Beta(S_i + 1, F_i + 1)` where `S_i`/`F_i`
/// count the revealed successes/failures. Delays only affect when counts
/// grow; the algorithm itself is unchanged.
#[derive(Debug, Clone)]
pub struct ThompsonSampling {
    counts: ArmCounts,
    samples: Vec<f64>,
}

impl ThompsonSampling {
    pub fn new(arms: usize) -> Self {
        Self {
            counts: ArmCounts::new(arms),
            samples: vec![0.0; arms],
        }
    }

    pub fn counts(&self) -> &ArmCounts {
        &self.counts
    }

    /// Posterior samples drawn in the last call to `select`.
    pub fn last_samples(&self) -> &[f64] {
        &self.samples
    }
}

/// One draw from `Beta(successes + 1, failures + 1)`.
pub(crate) fn posterior_draw(successes: u64, failures: u64, rng: &mut SimRng) -> f64 {
    Beta::new(successes as f64 + 1.0, failures as f64 + 1.0)
        .expect("shape parameters are at least 1")
        .sample(rng)
}

impl Policy for ThompsonSampling {
    fn name(&self) -> &str {
        "ts"
    }

    fn arms(&self) -> usize {
        self.counts.arms()
    }

    fn select(&mut self, _round: u64, rng: &mut SimRng) -> usize {
        // Every arm is drawn every round, in arm order.
        for (arm, slot) in self.samples.iter_mut().enumerate() {
            *slot = posterior_draw(self.counts.successes(arm), self.counts.failures(arm), rng);
        }
        argmax_random_tie(self.samples.iter().copied(), rng)
    }

    fn observe(&mut self, batch: &FeedbackBatch) -> Result<(), PolicyError> {
        self.counts.record(batch)
    }

    fn observed(&self) -> u64 {
        self.counts.total()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Stream};

    #[test]
    fn empty_batch_leaves_state_unchanged() {
        let mut ts = ThompsonSampling::new(3);
        ts.observe(&FeedbackBatch::default()).unwrap();
        assert_eq!(ts.counts(), &ArmCounts::new(3));
    }

    #[test]
    fn update_rule() {
        let mut ts = ThompsonSampling::new(3);
        ts.observe(&[(1, true), (1, false)].into_iter().collect())
            .unwrap();
        assert_eq!(ts.counts().successes(1), 1);
        assert_eq!(ts.counts().failures(1), 1);

        let mut ts = ThompsonSampling::new(2);
        let batch: FeedbackBatch = (0..300).map(|i| (0, i < 200)).collect();
        ts.observe(&batch).unwrap();
        assert_eq!(ts.counts().successes(0), 200);
        assert_eq!(ts.counts().failures(0), 100);
        assert_eq!(ts.observed(), 300);
    }

    #[test]
    fn out_of_range_observation_is_an_error() {
        let mut ts = ThompsonSampling::new(2);
        let batch: FeedbackBatch = [(2, true)].into_iter().collect();
        assert!(ts.observe(&batch).is_err());
    }

    #[test]
    fn symmetric_prior_selects_uniformly() {
        let k = 4;
        let n = 100_000;
        let mut ts = ThompsonSampling::new(k);
        let mut rng = substream(3, Stream::Policy);
        let mut hits = vec![0u32; k];
        for t in 1..=n {
            hits[ts.select(t, &mut rng)] += 1;
        }
        let p = 1.0 / k as f64;
        let sigma = (n as f64 * p * (1.0 - p)).sqrt();
        for h in hits {
            assert!((h as f64 - n as f64 * p).abs() <= 3.0 * sigma, "{h}");
        }
    }

    #[test]
    fn concentrated_posteriors_pick_the_winner() {
        // P(Beta(101,1) > Beta(1,101)) = 1 - 1/C(202,101), essentially 1.
        let mut ts = ThompsonSampling::new(2);
        let batch: FeedbackBatch = (0..100).flat_map(|_| [(0, true), (1, false)]).collect();
        ts.observe(&batch).unwrap();
        let mut rng = substream(4, Stream::Policy);
        let wins = (1..=10_000)
            .filter(|&t| ts.select(t, &mut rng) == 0)
            .count();
        assert!(wins as f64 / 10_000.0 > 0.999);
    }

    #[test]
    fn replay_is_deterministic() {
        let run = || {
            let mut ts = ThompsonSampling::new(5);
            let mut rng = substream(99, Stream::Policy);
            (1..=200)
                .map(|t| ts.select(t, &mut rng))
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }
}
