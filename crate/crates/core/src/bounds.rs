//! Explicit-term evaluators for the delayed-feedback regret bounds.
//!
//! The bounds depend on the delays only through the quantiles `d_i(q_i)`.
//! Every evaluator returns the sum of the explicitly stated terms; the
//! unspecified `O(1/Δ + 1/Δ³)` remainders are left out and reported in
//! [`BoundValue::omitted`], so the numbers are diagnostics, not certified
//! upper bounds. Logarithms are natural.
//!
//! Arm indices follow the bandit instance; the optimal arm plays the role of
//! "arm 1" of the formulas and its level is `q[optimal]`.

use serde::Serialize;
use thiserror::Error;

use crate::delay::{Delay, DelayError, DelayModel};
use crate::env::BanditInstance;
use crate::rng::{mix64, substream, Stream};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundError {
    #[error("quantile level {0} is outside (0, 1]")]
    InvalidLevel(f64),
    #[error("probability {0} must lie strictly inside (0, 1)")]
    BoundaryProbability(f64),
    #[error("{bound} needs {expected} arms, got {got}")]
    ArmCount {
        bound: &'static str,
        expected: &'static str,
        got: usize,
    },
    #[error("expected {expected} quantile levels, got {got}")]
    LevelCount { expected: usize, got: usize },
    #[error("horizon must be at least 2, got {0}")]
    Horizon(u64),
    #[error("grid needs at least 10 points per dimension, got {0}")]
    GridTooCoarse(usize),
    #[error(transparent)]
    Delay(#[from] DelayError),
}

/// KL divergence between Bernoulli(`y`) and Bernoulli(`mu`):
/// `y ln(y/mu) + (1-y) ln((1-y)/(1-mu))`.
pub fn kl_bernoulli(y: f64, mu: f64) -> Result<f64, BoundError> {
    for p in [y, mu] {
        if !(p > 0.0 && p < 1.0) {
            return Err(BoundError::BoundaryProbability(p));
        }
    }
    Ok(y * (y / mu).ln() + (1.0 - y) * ((1.0 - y) / (1.0 - mu)).ln())
}

/// Problem data shared by the bound evaluators.
#[derive(Debug, Clone)]
pub struct BoundInput {
    horizon: u64,
    gaps: Vec<f64>,
    optimal: usize,
    delays: DelayModel,
}

impl BoundInput {
    pub fn new(
        instance: &BanditInstance,
        delays: DelayModel,
        horizon: u64,
    ) -> Result<Self, BoundError> {
        if horizon < 2 {
            return Err(BoundError::Horizon(horizon));
        }
        delays.validate(instance.arms())?;
        if !delays.is_iid() {
            return Err(DelayError::Unsupported(delays.family()).into());
        }
        Ok(Self {
            horizon,
            gaps: instance.gaps().to_vec(),
            optimal: instance.optimal_arm(),
            delays,
        })
    }

    pub fn arms(&self) -> usize {
        self.gaps.len()
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn optimal(&self) -> usize {
        self.optimal
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    pub fn delays(&self) -> &DelayModel {
        &self.delays
    }

    fn log_t(&self) -> f64 {
        (self.horizon as f64).ln()
    }

    fn suboptimal(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.arms()).filter(move |&i| i != self.optimal)
    }

    fn quantile(&self, arm: usize, q: f64) -> Result<f64, BoundError> {
        check_level(q)?;
        Ok(self.delays.quantile(arm, q)?.as_f64())
    }

    fn check_levels(&self, q: &[f64]) -> Result<(), BoundError> {
        if q.len() != self.arms() {
            return Err(BoundError::LevelCount {
                expected: self.arms(),
                got: q.len(),
            });
        }
        q.iter().try_for_each(|&l| check_level(l))
    }
}

fn check_level(q: f64) -> Result<(), BoundError> {
    if q > 0.0 && q <= 1.0 {
        Ok(())
    } else {
        Err(BoundError::InvalidLevel(q))
    }
}

/// `x · Δ` where an infinite quantile stays infinite.
fn delay_cost(d: f64, gap: f64) -> f64 {
    if d.is_infinite() {
        f64::INFINITY
    } else {
        d * gap
    }
}

/// Two-arm Thompson sampling bound, explicit terms:
/// `48 ln T/(q₂Δ) + (6/Δ)(32 ln T/(q₁Δ) + d₁(q₁)Δ + Δ) + d₂(q₂)Δ`.
pub fn ts_two_arm_bound(input: &BoundInput, q_opt: f64, q_sub: f64) -> Result<f64, BoundError> {
    if input.arms() != 2 {
        return Err(BoundError::ArmCount {
            bound: "two-arm bound",
            expected: "exactly 2",
            got: input.arms(),
        });
    }
    let sub = 1 - input.optimal;
    Ok(ts_sub_term(input, sub, q_sub)? + ts_opt_term(input, sub, q_opt)?)
}

/// `48 ln T/(q_i Δ_i) + d_i(q_i) Δ_i`
fn ts_sub_term(input: &BoundInput, arm: usize, q: f64) -> Result<f64, BoundError> {
    let gap = input.gaps[arm];
    let d = input.quantile(arm, q)?;
    Ok(48.0 * input.log_t() / (q * gap) + delay_cost(d, gap))
}

/// `(6/Δ_i)(32 ln T/(q₁Δ_i) + d₁(q₁)Δ_i + Δ_i)`
fn ts_opt_term(input: &BoundInput, arm: usize, q_opt: f64) -> Result<f64, BoundError> {
    let gap = input.gaps[arm];
    let d = input.quantile(input.optimal, q_opt)?;
    Ok((6.0 / gap) * (32.0 * input.log_t() / (q_opt * gap) + delay_cost(d, gap) + gap))
}

/// Multi-arm Thompson sampling bound, explicit terms:
/// `Σ_{i≠1} [48 ln T/(q_iΔ_i) + d_i(q_i)Δ_i] + Σ_{i≠1} (6/Δ_i)(32 ln T/(q₁Δ_i) + d₁(q₁)Δ_i + Δ_i) + 4(K−1)`.
///
/// The third sum of the full bound multiplies an unspecified `O(·)` factor
/// and is not evaluated.
pub fn ts_multi_arm_bound(input: &BoundInput, q: &[f64]) -> Result<f64, BoundError> {
    if input.arms() <= 2 {
        return Err(BoundError::ArmCount {
            bound: "multi-arm bound",
            expected: "more than 2",
            got: input.arms(),
        });
    }
    input.check_levels(q)?;
    let mut total = 4.0 * (input.arms() - 1) as f64;
    for i in input.suboptimal() {
        total += ts_sub_term(input, i, q[i])? + ts_opt_term(input, i, q[input.optimal])?;
    }
    Ok(total)
}

/// Successive-elimination bound.
///
/// `Σ_{i≠1} (40 ln T/Δ_i)(1/q₁ + 1/q_i) + ln(K) · max_{i≠1} (d₁(q₁) + d_i(q_i))Δ_i`,
/// which for `K = 2` is `(40 ln T/Δ)(1/q₁ + 1/q₂) + ln 2 (d₁(q₁) + d₂(q₂))Δ`.
pub fn se_bound(input: &BoundInput, q: &[f64]) -> Result<f64, BoundError> {
    input.check_levels(q)?;
    let opt = input.optimal;
    let d_opt = input.quantile(opt, q[opt])?;
    let mut sum = 0.0;
    let mut worst = f64::NEG_INFINITY;
    for i in input.suboptimal() {
        let gap = input.gaps[i];
        sum += 40.0 * input.log_t() / gap * (1.0 / q[opt] + 1.0 / q[i]);
        let d = input.quantile(i, q[i])?;
        worst = worst.max(delay_cost(d_opt + d, gap));
    }
    Ok(sum + (input.arms() as f64).ln() * worst)
}

/// Which bound to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    TsTwoArm,
    TsMultiArm,
    #[serde(rename = "se")]
    SuccessiveElimination,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::TsTwoArm => "ts_two_arm",
            BoundKind::TsMultiArm => "ts_multi_arm",
            BoundKind::SuccessiveElimination => "se",
        }
    }

    /// The Thompson sampling bound matching the arm count.
    pub fn thompson_for(arms: usize) -> Self {
        if arms == 2 {
            BoundKind::TsTwoArm
        } else {
            BoundKind::TsMultiArm
        }
    }

    /// Evaluates the bound at levels `q` (indexed by arm).
    pub fn evaluate(self, input: &BoundInput, q: &[f64]) -> Result<f64, BoundError> {
        match self {
            BoundKind::TsTwoArm => {
                input.check_levels(q)?;
                let opt = input.optimal;
                ts_two_arm_bound(input, q[opt], q[1 - opt])
            }
            BoundKind::TsMultiArm => ts_multi_arm_bound(input, q),
            BoundKind::SuccessiveElimination => se_bound(input, q),
        }
    }

    fn omitted(self) -> Vec<OmittedTerm> {
        match self {
            BoundKind::TsTwoArm => vec![OmittedTerm::Remainder],
            BoundKind::TsMultiArm => vec![OmittedTerm::Remainder, OmittedTerm::UnresolvedProduct],
            BoundKind::SuccessiveElimination => vec![],
        }
    }
}

/// Terms of a bound that are not part of the reported value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OmittedTerm {
    /// The `O(1/Δ_i + 1/Δ_i³)` remainder.
    Remainder,
    /// `O(1/Δ_i + 1/Δ_i³)` times the unsaturated-pull count; its constant is
    /// unspecified.
    UnresolvedProduct,
}

/// Result of a minimization over quantile levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub kind: BoundKind,
    pub value: f64,
    /// Minimizing level per arm.
    pub q_star: Vec<f64>,
    pub omitted: Vec<OmittedTerm>,
}

/// Quantile-level search grid `{1/n, 2/n, …, 1}`, optionally refined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QGrid {
    points: usize,
    refinements: usize,
}

impl QGrid {
    /// `points` evenly spaced levels ending at 1, followed by `refinements`
    /// rounds of local ×10 refinement around each coordinate's best level.
    pub fn new(points: usize, refinements: usize) -> Result<Self, BoundError> {
        if points < 10 {
            return Err(BoundError::GridTooCoarse(points));
        }
        Ok(Self {
            points,
            refinements,
        })
    }

    /// A plain grid without refinement.
    pub fn plain(points: usize) -> Result<Self, BoundError> {
        Self::new(points, 0)
    }

    pub fn levels(&self) -> Vec<f64> {
        (1..=self.points)
            .map(|j| j as f64 / self.points as f64)
            .collect()
    }

    pub fn step(&self) -> f64 {
        1.0 / self.points as f64
    }
}

impl Default for QGrid {
    /// Step 0.05 with three refinement rounds (final step 5e-5).
    fn default() -> Self {
        Self {
            points: 20,
            refinements: 3,
        }
    }
}

/// Minimizes a bound over per-arm quantile levels.
///
/// All bounds separate into one term per level except the coupled `max`
/// of the successive-elimination bound for `K > 2`. Separable levels are
/// minimized one coordinate at a time. The coupled case fixes `q₁` on the
/// grid and, for each candidate value of the max term, gives every other arm
/// the largest level whose delay cost stays under it; this is exact over
/// the grid.
pub fn minimize_bound(
    kind: BoundKind,
    input: &BoundInput,
    grid: &QGrid,
) -> Result<BoundValue, BoundError> {
    let k = input.arms();
    let coupled = kind == BoundKind::SuccessiveElimination && k > 2;
    // Validate the arm count once through the evaluator itself.
    kind.evaluate(input, &vec![1.0; k])?;

    // Start at the smallest level, where quantiles are smallest and most
    // likely finite, so the other coordinates contribute a finite constant.
    let mut q_star = vec![grid.step(); k];
    if coupled {
        minimize_coupled_se(input, grid, &mut q_star)?;
    } else {
        // Separable: the objective is Σ_i f_i(q_i) + const, so each level
        // can be tuned against the full bound with the others held fixed.
        for arm in 0..k {
            let (q, _) = minimize_1d(grid, |q| {
                let mut levels = q_star.clone();
                levels[arm] = q;
                kind.evaluate(input, &levels)
            })?;
            q_star[arm] = q;
        }
    }
    let value = kind.evaluate(input, &q_star)?;
    Ok(BoundValue {
        kind,
        value,
        q_star,
        omitted: kind.omitted(),
    })
}

/// Grid search plus local refinement of a scalar function on `(0, 1]`.
fn minimize_1d<F>(grid: &QGrid, mut f: F) -> Result<(f64, f64), BoundError>
where
    F: FnMut(f64) -> Result<f64, BoundError>,
{
    let mut best = (1.0, f(1.0)?);
    for q in grid.levels() {
        let v = f(q)?;
        if v < best.1 {
            best = (q, v);
        }
    }
    // Refinement round r searches k / (points · 10^r) within one previous
    // step of the incumbent; integer ratios avoid accumulated drift.
    let mut denom = grid.points as u64;
    let mut center = (best.0 * denom as f64).round() as u64;
    for _ in 0..grid.refinements {
        denom *= 10;
        center *= 10;
        let lo = center.saturating_sub(10).max(1);
        let hi = (center + 10).min(denom);
        for k in lo..=hi {
            let q = k as f64 / denom as f64;
            let v = f(q)?;
            if v < best.1 {
                best = (q, v);
                center = k;
            }
        }
    }
    Ok(best)
}

fn minimize_coupled_se(
    input: &BoundInput,
    grid: &QGrid,
    q_star: &mut [f64],
) -> Result<(), BoundError> {
    let opt = input.optimal;
    let levels = grid.levels();
    let log_t = input.log_t();
    let log_k = (input.arms() as f64).ln();
    let subs: Vec<usize> = input.suboptimal().collect();
    let mut best = f64::INFINITY;

    for &q1 in &levels {
        let d1 = input.quantile(opt, q1)?;
        // Per arm: (level, 1/q cost, delay cost), levels ascending, so the
        // delay cost is nondecreasing along each row.
        let mut rows = Vec::with_capacity(subs.len());
        for &i in &subs {
            let gap = input.gaps[i];
            let coef = 40.0 * log_t / gap;
            let row: Vec<(f64, f64, f64)> = levels
                .iter()
                .map(|&q| Ok((q, coef / q, delay_cost(d1 + input.quantile(i, q)?, gap))))
                .collect::<Result<_, BoundError>>()?;
            rows.push((coef / q1, row));
        }
        let mut caps: Vec<f64> = rows
            .iter()
            .flat_map(|(_, row)| row.iter().map(|r| r.2))
            .filter(|c| c.is_finite())
            .collect();
        caps.sort_by(f64::total_cmp);
        caps.dedup();
        for &cap in &caps {
            let mut total = 0.0;
            let mut worst = f64::NEG_INFINITY;
            let mut choice = Vec::with_capacity(rows.len());
            for (fixed, row) in &rows {
                let Some(&(q, cost, delay)) = row.iter().rev().find(|r| r.2 <= cap) else {
                    total = f64::INFINITY;
                    break;
                };
                total += fixed + cost;
                worst = worst.max(delay);
                choice.push(q);
            }
            let total = total + log_k * worst;
            if total < best {
                best = total;
                q_star[opt] = q1;
                for (&i, &q) in subs.iter().zip(&choice) {
                    q_star[i] = q;
                }
            }
        }
    }
    Ok(())
}

/// One row of the concentration check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaRow {
    /// Number of pulls, made at rounds `1..=m`.
    pub pulls: u64,
    /// `d(q)`; `None` when infinite.
    pub quantile: Option<u64>,
    pub violations: u64,
    pub trials: u64,
    pub estimate: f64,
    pub std_error: f64,
    /// `exp(-q m / 8)`
    pub bound: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub q: f64,
    pub rows: Vec<LemmaRow>,
    pub pass: bool,
}

/// Monte Carlo check of `P[n_{m + d(q)} < (q/2) m] ≤ exp(-q m / 8)`.
///
/// For each `m`, pulls the arm at rounds `1..=m`, counts the rewards revealed
/// by round `m + d(q)`, and records a violation when fewer than `q m / 2`
/// arrived. A row passes when the violation rate is at most the bound plus
/// three standard errors. Trials use independent seeds derived from `seed`.
pub fn lemma_a1_check(
    delays: &DelayModel,
    arm: usize,
    q: f64,
    pulls: &[u64],
    trials: u64,
    seed: u64,
) -> Result<LemmaReport, BoundError> {
    check_level(q)?;
    let quantile = delays.quantile(arm, q)?;
    let mut rows = Vec::with_capacity(pulls.len());
    for &m in pulls {
        let deadline = match quantile {
            Delay::Finite(d) => Some(m.saturating_add(d)),
            Delay::Infinite => None,
        };
        let trial = |t: u64| -> bool {
            let mut rng = substream(mix64(seed ^ mix64(m)) ^ t, Stream::Delays);
            let arrived = (1..=m)
                .filter(
                    |&s| match (delays.sample(arm, s, &mut [], &mut rng), deadline) {
                        (Delay::Infinite, _) => false,
                        (Delay::Finite(_), None) => true,
                        (Delay::Finite(l), Some(limit)) => s.saturating_add(l) <= limit,
                    },
                )
                .count();
            (arrived as f64) < q / 2.0 * m as f64
        };
        let violations = count_violations(trials, trial);
        let estimate = violations as f64 / trials as f64;
        let std_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
        let bound = (-q * m as f64 / 8.0).exp();
        rows.push(LemmaRow {
            pulls: m,
            quantile: quantile.finite(),
            violations,
            trials,
            estimate,
            std_error,
            bound,
            pass: estimate <= bound + 3.0 * std_error,
        });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(LemmaReport { q, rows, pass })
}

#[cfg(feature = "parallel")]
fn count_violations<F: Fn(u64) -> bool + Sync>(trials: u64, trial: F) -> u64 {
    use rayon::prelude::*;
    (0..trials).into_par_iter().filter(|&t| trial(t)).count() as u64
}

#[cfg(not(feature = "parallel"))]
fn count_violations<F: Fn(u64) -> bool>(trials: u64, trial: F) -> u64 {
    (0..trials).filter(|&t| trial(t)).count() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn two_arm(gap: f64, delays: DelayModel, horizon: u64) -> BoundInput {
        let instance = BanditInstance::new(vec![0.5 + gap / 2.0, 0.5 - gap / 2.0]).unwrap();
        BoundInput::new(&instance, delays, horizon).unwrap()
    }

    #[test]
    fn kl_values() {
        assert_eq!(kl_bernoulli(0.5, 0.5).unwrap(), 0.0);
        let a = kl_bernoulli(0.425, 0.4).unwrap();
        let b = kl_bernoulli(0.4, 0.425).unwrap();
        assert!(a > 0.0 && b > 0.0 && a != b);
        assert_relative_eq!(
            kl_bernoulli(0.3, 0.7).unwrap(),
            0.338_919_144_154_881_4,
            max_relative = 1e-12
        );
        assert!(kl_bernoulli(0.0, 0.5).is_err());
        assert!(kl_bernoulli(0.5, 1.0).is_err());
    }

    #[test]
    fn two_arm_zero_delay() {
        // 48 L/0.2 + 30 (32 L/0.2 + 0.2), L = ln 1e4
        let input = two_arm(0.2, DelayModel::Fixed { delay: 0 }, 10_000);
        let l = 10_000f64.ln();
        let expected = 48.0 * l / 0.2 + 30.0 * (32.0 * l / 0.2 + 0.2);
        let got = ts_two_arm_bound(&input, 1.0, 1.0).unwrap();
        assert_relative_eq!(got, expected, max_relative = 1e-9);
        assert_relative_eq!(got, 46_426.115_474_76, max_relative = 1e-9);
    }

    #[test]
    fn two_arm_fixed_delay_adds_seven_d_gap_over_gap() {
        // d enters as (6/Δ) dΔ + dΔ = 6d + dΔ.
        let gap = 0.2;
        let base = ts_two_arm_bound(
            &two_arm(gap, DelayModel::Fixed { delay: 0 }, 1000),
            0.5,
            0.5,
        )
        .unwrap();
        let with = ts_two_arm_bound(
            &two_arm(gap, DelayModel::Fixed { delay: 40 }, 1000),
            0.5,
            0.5,
        )
        .unwrap();
        assert_relative_eq!(with - base, 6.0 * 40.0 + 40.0 * gap, max_relative = 1e-9);
    }

    #[test]
    fn infinite_quantile_propagates() {
        let instance = BanditInstance::new(vec![0.6, 0.4]).unwrap();
        let input = BoundInput::new(
            &instance,
            DelayModel::PacketLoss { p: vec![1.0, 0.3] },
            1000,
        )
        .unwrap();
        assert_eq!(ts_two_arm_bound(&input, 1.0, 0.5).unwrap(), f64::INFINITY);
        assert!(ts_two_arm_bound(&input, 1.0, 0.3).unwrap().is_finite());
        assert_eq!(se_bound(&input, &[1.0, 0.5]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn se_two_arm_zero_delay() {
        let input = two_arm(0.2, DelayModel::Fixed { delay: 0 }, 10_000);
        let expected = 40.0 * 10_000f64.ln() / 0.2 * 2.0;
        assert_relative_eq!(
            se_bound(&input, &[1.0, 1.0]).unwrap(),
            expected,
            max_relative = 1e-9
        );
        assert_relative_eq!(expected, 3_684.136_148_790_47, max_relative = 1e-9);
    }

    #[test]
    fn se_fixed_delay_term() {
        let gap = 0.2;
        let d = 30;
        let base = se_bound(
            &two_arm(gap, DelayModel::Fixed { delay: 0 }, 500),
            &[1.0, 1.0],
        )
        .unwrap();
        let with = se_bound(
            &two_arm(gap, DelayModel::Fixed { delay: d }, 500),
            &[1.0, 1.0],
        )
        .unwrap();
        assert_relative_eq!(
            with - base,
            2f64.ln() * 2.0 * d as f64 * gap,
            max_relative = 1e-9
        );
    }

    #[test]
    fn se_delay_term_grows_like_log_k() {
        let delay_term = |k: usize| {
            let mut means = vec![0.3; k];
            means[0] = 0.5;
            let instance = BanditInstance::new(means).unwrap();
            let at = |d| {
                let input =
                    BoundInput::new(&instance, DelayModel::Fixed { delay: d }, 1000).unwrap();
                se_bound(&input, &vec![1.0; k]).unwrap()
            };
            at(10) - at(0)
        };
        for k in [2, 4, 8] {
            assert_relative_eq!(
                delay_term(k),
                (k as f64).ln() * 20.0 * 0.2,
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn multi_arm_zero_delay_by_hand() {
        let instance = BanditInstance::new(vec![0.7, 0.5, 0.2]).unwrap();
        let input = BoundInput::new(&instance, DelayModel::Fixed { delay: 0 }, 1000).unwrap();
        let l = 1000f64.ln();
        let by_hand = (48.0 * l / 0.2 + (6.0 / 0.2) * (32.0 * l / 0.2 + 0.2))
            + (48.0 * l / 0.5 + (6.0 / 0.5) * (32.0 * l / 0.5 + 0.5))
            + 8.0;
        assert_relative_eq!(
            ts_multi_arm_bound(&input, &[1.0; 3]).unwrap(),
            by_hand,
            max_relative = 1e-12
        );
    }

    #[test]
    fn multi_arm_symmetry() {
        let instance = BanditInstance::new(vec![0.8, 0.6, 0.6, 0.6]).unwrap();
        let input = BoundInput::new(&instance, DelayModel::Geometric { p: 0.05 }, 5000).unwrap();
        let a = ts_multi_arm_bound(&input, &[0.9, 0.3, 0.6, 0.8]).unwrap();
        let b = ts_multi_arm_bound(&input, &[0.9, 0.8, 0.3, 0.6]).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn arm_count_preconditions() {
        let input = two_arm(0.2, DelayModel::Fixed { delay: 0 }, 100);
        assert!(ts_multi_arm_bound(&input, &[1.0, 1.0]).is_err());
        let instance = BanditInstance::new(vec![0.7, 0.5, 0.2]).unwrap();
        let input3 = BoundInput::new(&instance, DelayModel::Fixed { delay: 0 }, 100).unwrap();
        assert!(ts_two_arm_bound(&input3, 1.0, 1.0).is_err());
        assert!(ts_two_arm_bound(&input, 0.0, 1.0).is_err());
        assert!(se_bound(&input, &[1.0]).is_err());
        assert!(QGrid::plain(9).is_err());
    }

    #[test]
    fn fixed_delay_minimizer_is_one() {
        let input = two_arm(0.3, DelayModel::Fixed { delay: 100 }, 10_000);
        for kind in [BoundKind::TsTwoArm, BoundKind::SuccessiveElimination] {
            let v = minimize_bound(kind, &input, &QGrid::default()).unwrap();
            assert_eq!(v.q_star, vec![1.0, 1.0]);
        }
    }

    #[test]
    fn packet_loss_minimizer_is_feasible() {
        let instance = BanditInstance::new(vec![0.6, 0.4]).unwrap();
        let input = BoundInput::new(
            &instance,
            DelayModel::PacketLoss { p: vec![0.5, 0.5] },
            1000,
        )
        .unwrap();
        let v = minimize_bound(BoundKind::TsTwoArm, &input, &QGrid::default()).unwrap();
        assert!(v.value.is_finite());
        assert!(v.q_star.iter().all(|&q| q <= 0.5 + 1e-12));
        assert_eq!(v.omitted, vec![OmittedTerm::Remainder]);
    }

    #[test]
    fn all_infinite_grid_gives_infinity() {
        let instance = BanditInstance::new(vec![0.6, 0.4]).unwrap();
        let input = BoundInput::new(
            &instance,
            DelayModel::PacketLoss { p: vec![0.0, 0.0] },
            1000,
        )
        .unwrap();
        let v =
            minimize_bound(BoundKind::SuccessiveElimination, &input, &QGrid::default()).unwrap();
        assert_eq!(v.value, f64::INFINITY);
    }

    #[test]
    fn coupled_minimum_matches_brute_force() {
        let instance = BanditInstance::new(vec![0.8, 0.5, 0.35]).unwrap();
        let delays = DelayModel::Pareto {
            alpha: vec![1.0, 0.6, 0.3],
        };
        let input = BoundInput::new(&instance, delays, 5000).unwrap();
        let grid = QGrid::plain(10).unwrap();
        let v = minimize_bound(BoundKind::SuccessiveElimination, &input, &grid).unwrap();
        let levels = grid.levels();
        let mut brute = f64::INFINITY;
        for &a in &levels {
            for &b in &levels {
                for &c in &levels {
                    brute = brute.min(se_bound(&input, &[a, b, c]).unwrap());
                }
            }
        }
        assert_relative_eq!(v.value, brute, max_relative = 1e-12);
    }

    #[test]
    fn lemma_check_fixed_delay_never_violates() {
        let r = lemma_a1_check(&DelayModel::Fixed { delay: 5 }, 0, 0.5, &[10, 50], 200, 1).unwrap();
        assert!(r.pass);
        assert!(r.rows.iter().all(|row| row.violations == 0));
    }

    #[test]
    fn lemma_check_rejects_queue() {
        assert!(lemma_a1_check(
            &DelayModel::Queue { service_rate: 0.1 },
            0,
            0.5,
            &[10],
            10,
            1
        )
        .is_err());
    }

    proptest! {
        #[test]
        fn monotone_in_levels_and_quantiles(q1 in 0.05f64..1.0, q2 in 0.05f64..1.0, bump in 0.0f64..0.5, d in 0u64..500) {
            let input = two_arm(0.25, DelayModel::Fixed { delay: d }, 2000);
            let larger = two_arm(0.25, DelayModel::Fixed { delay: d + 10 }, 2000);
            let q2b = (q2 + bump).min(1.0);
            let a = ts_two_arm_bound(&input, q1, q2).unwrap();
            prop_assert!(ts_two_arm_bound(&input, q1, q2b).unwrap() <= a + 1e-9);
            prop_assert!(ts_two_arm_bound(&larger, q1, q2).unwrap() >= a);
            let s = se_bound(&input, &[q1, q2]).unwrap();
            prop_assert!(se_bound(&input, &[q1, q2b]).unwrap() <= s + 1e-9);
            prop_assert!(se_bound(&larger, &[q1, q2]).unwrap() >= s);
        }

        #[test]
        fn pinsker(y in 0.001f64..0.999, mu in 0.001f64..0.999) {
            prop_assert!(kl_bernoulli(y, mu).unwrap() >= 2.0 * (y - mu).powi(2) - 1e-15);
        }

        #[test]
        fn minimum_is_below_every_grid_point(p in 0.01f64..0.5, gap in 0.05f64..0.9) {
            let input = two_arm(gap, DelayModel::Geometric { p }, 10_000);
            let grid = QGrid::default();
            for kind in [BoundKind::TsTwoArm, BoundKind::SuccessiveElimination] {
                let v = minimize_bound(kind, &input, &grid).unwrap();
                for &a in &grid.levels() {
                    for &b in &grid.levels() {
                        prop_assert!(v.value <= kind.evaluate(&input, &[a, b]).unwrap() + 1e-9);
                    }
                }
            }
        }
    }
}
