use super::{argmax_random_tie, ArmCounts, Policy, PolicyError};
use crate::env::FeedbackBatch;
use crate::rng::SimRng;

/// UCB1 run on whatever feedback has arrived.
///
/// Index of arm `i` at round `t`: `mean_i + sqrt(2 ln t / n_i)` where `n_i`
/// counts observed rewards and `t` is the global round. Unobserved arms have
/// an infinite index; ties are broken uniformly at random.
#[derive(Debug, Clone)]
pub struct DelayedUcb1 {
    counts: ArmCounts,
}

impl DelayedUcb1 {
    pub fn new(arms: usize) -> Self {
        Self {
            counts: ArmCounts::new(arms),
        }
    }

    pub fn counts(&self) -> &ArmCounts {
        &self.counts
    }

    pub fn index(&self, arm: usize, round: u64) -> f64 {
        match self.counts.trials(arm) {
            0 => f64::INFINITY,
            n => self.counts.mean(arm) + (2.0 * (round as f64).ln() / n as f64).sqrt(),
        }
    }
}

impl Policy for DelayedUcb1 {
    fn name(&self) -> &str {
        "ducb1"
    }

    fn arms(&self) -> usize {
        self.counts.arms()
    }

    fn select(&mut self, round: u64, rng: &mut SimRng) -> usize {
        let round = round.max(1);
        argmax_random_tie((0..self.arms()).map(|arm| self.index(arm, round)), rng)
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

    fn with_counts(rows: &[(u64, u64)]) -> DelayedUcb1 {
        let mut p = DelayedUcb1::new(rows.len());
        let batch = rows
            .iter()
            .enumerate()
            .flat_map(|(arm, &(n, s))| (0..n).map(move |j| (arm, j < s)))
            .collect();
        p.observe(&batch).unwrap();
        p
    }

    #[test]
    fn unobserved_arms_are_uniform() {
        let mut p = DelayedUcb1::new(3);
        let mut rng = substream(5, Stream::Policy);
        let mut hits = [0u32; 3];
        for _ in 0..30_000 {
            hits[p.select(1, &mut rng)] += 1;
        }
        for h in hits {
            assert!((h as f64 - 10_000.0).abs() < 3.0 * (30_000.0f64 * 2.0 / 9.0).sqrt());
        }
    }

    #[test]
    fn equal_indices_split_evenly() {
        let mut p = with_counts(&[(4, 2), (4, 2)]);
        assert_eq!(p.index(0, 100), p.index(1, 100));
        let mut rng = substream(6, Stream::Policy);
        let ones = (0..10_000).filter(|_| p.select(100, &mut rng) == 1).count();
        assert!((ones as f64 - 5_000.0).abs() < 3.0 * 50.0);
    }

    #[test]
    fn larger_index_wins() {
        // 0.9 + sqrt(2 ln 100 / 10) = 1.8597 vs 0.1 + 0.9597 = 1.0597
        let mut p = with_counts(&[(10, 9), (10, 1)]);
        let expected = 0.9 + (2.0 * 100f64.ln() / 10.0).sqrt();
        assert!((p.index(0, 100) - expected).abs() < 1e-12);
        assert!((p.index(0, 100) - 1.859_705).abs() < 1e-6);
        let mut rng = substream(7, Stream::Policy);
        assert_eq!(p.select(100, &mut rng), 0);
    }
}
