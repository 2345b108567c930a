use super::{ArmCounts, Policy, PolicyError};
use crate::env::FeedbackBatch;
use crate::rng::SimRng;

/// Successive elimination with delays.
///
/// Arms in the active set are pulled round-robin, one sweep at a time. After
/// the last pull of a sweep and its feedback, confidence intervals
/// `mean ± sqrt(2 / max(n, 1))` are recomputed and every arm whose upper bound
/// is strictly below another active arm's lower bound is removed.
#[derive(Debug, Clone)]
pub struct SuccessiveElimination {
    counts: ArmCounts,
    active: Vec<usize>,
    sweep: Vec<usize>,
    cursor: usize,
    sweeps_done: u64,
}

impl SuccessiveElimination {
    pub fn new(arms: usize) -> Self {
        let active: Vec<usize> = (0..arms).collect();
        Self {
            counts: ArmCounts::new(arms),
            sweep: active.clone(),
            active,
            cursor: 0,
            sweeps_done: 0,
        }
    }

    pub fn counts(&self) -> &ArmCounts {
        &self.counts
    }

    /// Currently active arms, ascending.
    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn sweeps_done(&self) -> u64 {
        self.sweeps_done
    }

    pub fn radius(&self, arm: usize) -> f64 {
        (2.0 / self.counts.trials(arm).max(1) as f64).sqrt()
    }

    /// `(lower, upper)` confidence bounds; not clipped to `[0, 1]`.
    pub fn bounds(&self, arm: usize) -> (f64, f64) {
        let mean = self.counts.mean(arm);
        let r = self.radius(arm);
        (mean - r, mean + r)
    }

    /// Recomputes bounds and drops dominated arms. Returns the removed arms.
    ///
    /// The arm with the largest lower bound always survives, so the active
    /// set never empties.
    pub fn eliminate(&mut self) -> Vec<usize> {
        let best_lower = self
            .active
            .iter()
            .map(|&a| self.bounds(a).0)
            .fold(f64::NEG_INFINITY, f64::max);
        let (keep, removed): (Vec<usize>, Vec<usize>) = self
            .active
            .iter()
            .partition(|&&a| self.bounds(a).1 >= best_lower);
        self.active = keep;
        removed
    }

    /// Runs one full sweep through `pull`, which plays an arm and returns the
    /// feedback revealed in that round. Returns the arms pulled.
    pub fn sweep<F, E>(&mut self, mut pull: F) -> Result<Vec<usize>, E>
    where
        F: FnMut(usize) -> Result<FeedbackBatch, E>,
        E: From<PolicyError>,
    {
        let mut pulled = Vec::with_capacity(self.active.len());
        loop {
            let arm = self.next_arm();
            pulled.push(arm);
            let batch = pull(arm)?;
            self.observe(&batch)?;
            if self.cursor == self.sweep.len() {
                break;
            }
        }
        self.finish_sweep_if_done();
        Ok(pulled)
    }

    fn finish_sweep_if_done(&mut self) {
        if self.cursor == self.sweep.len() {
            self.eliminate();
            self.sweep.clone_from(&self.active);
            self.cursor = 0;
            self.sweeps_done += 1;
        }
    }

    fn next_arm(&mut self) -> usize {
        self.finish_sweep_if_done();
        let arm = self.sweep[self.cursor];
        self.cursor += 1;
        arm
    }
}

impl Policy for SuccessiveElimination {
    fn name(&self) -> &str {
        "se"
    }

    fn arms(&self) -> usize {
        self.counts.arms()
    }

    fn select(&mut self, _round: u64, _rng: &mut SimRng) -> usize {
        self.next_arm()
    }

    fn observe(&mut self, batch: &FeedbackBatch) -> Result<(), PolicyError> {
        // Reveals for eliminated arms still update their counts; they are
        // simply never consulted again.
        self.counts.record(batch)
    }

    fn observed(&self) -> u64 {
        self.counts.total()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::delay::DelayModel;
    use crate::env::{BanditInstance, Environment};
    use crate::rng::{substream, Stream};

    fn feed(se: &mut SuccessiveElimination, arm: usize, n: u64, ones: u64) {
        let batch = (0..n).map(|j| (arm, j < ones)).collect();
        se.observe(&batch).unwrap();
    }

    #[test]
    fn no_elimination_without_data() {
        let mut se = SuccessiveElimination::new(4);
        assert!((se.radius(0) - 2f64.sqrt()).abs() < 1e-15);
        assert!(se.eliminate().is_empty());
        assert_eq!(se.active(), &[0, 1, 2, 3]);
    }

    #[test]
    fn separated_arms_are_eliminated() {
        // radius sqrt(2/200) = 0.1: LCB(0) = 0.8 > UCB(1) = 0.2
        let mut se = SuccessiveElimination::new(2);
        feed(&mut se, 0, 200, 180);
        feed(&mut se, 1, 200, 20);
        let (lo, _) = se.bounds(0);
        let (_, hi) = se.bounds(1);
        assert!((lo - 0.8).abs() < 1e-12 && (hi - 0.2).abs() < 1e-12);
        assert_eq!(se.eliminate(), vec![1]);
        assert_eq!(se.active(), &[0]);
    }

    #[test]
    fn round_robin_then_single_arm_forever() {
        let mut se = SuccessiveElimination::new(3);
        let mut rng = substream(0, Stream::Policy);
        let first: Vec<_> = (1..=6).map(|t| se.select(t, &mut rng)).collect();
        assert_eq!(first, vec![0, 1, 2, 0, 1, 2]);

        feed(&mut se, 0, 400, 400);
        feed(&mut se, 1, 400, 0);
        feed(&mut se, 2, 400, 0);
        // Bounds are recomputed at the start of the next sweep.
        let next: Vec<_> = (7..=12).map(|t| se.select(t, &mut rng)).collect();
        assert_eq!(next, vec![0; 6]);
        assert_eq!(se.active(), &[0]);
    }

    #[test]
    fn sweep_with_env_hook() {
        let instance = BanditInstance::new(vec![0.9, 0.1]).unwrap();
        let mut env =
            Environment::new(instance, DelayModel::Fixed { delay: 0 }, 10_000, 3).unwrap();
        let mut se = SuccessiveElimination::new(2);
        let mut sizes = vec![];
        for _ in 0..1_000 {
            let pulled = se
                .sweep(|arm| env.step(arm).map_err(|e| e.to_string()).map_err(Hook))
                .unwrap();
            sizes.push(pulled.len());
        }
        assert!(sizes.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(se.active(), &[0]);
    }

    #[derive(Debug)]
    struct Hook(#[allow(dead_code)] String);

    impl From<PolicyError> for Hook {
        fn from(e: PolicyError) -> Self {
            Hook(e.to_string())
        }
    }

    #[test]
    fn eliminated_arm_reveals_are_tolerated() {
        let mut se = SuccessiveElimination::new(2);
        feed(&mut se, 0, 200, 180);
        feed(&mut se, 1, 200, 20);
        se.eliminate();
        feed(&mut se, 1, 5, 5);
        assert_eq!(se.counts().trials(1), 205);
        assert_eq!(se.active(), &[0]);
    }
}
