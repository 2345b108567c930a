//! Delay distributions.
//!
//! Every model produces delays in `ℕ ∪ {∞}`, represented by [`Delay`]. The
//! i.i.d. families also expose their exact quantile function
//! `d(q) = inf { d : P[delay ≤ d] ≥ q }` over the integer support, which the
//! regret bounds consume. The queue-based model is not i.i.d. and has no
//! quantile.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Finite delays larger than this are clamped to it. Such a delay lies beyond
/// any simulated horizon, so clamping only avoids integer overflow.
pub const MAX_FINITE_DELAY: u64 = 1 << 62;

/// A delay in rounds, or a reward that is never revealed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Delay {
    Finite(u64),
    Infinite,
}

impl Delay {
    pub fn is_finite(self) -> bool {
        matches!(self, Delay::Finite(_))
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Delay::Finite(d) => Some(d),
            Delay::Infinite => None,
        }
    }

    /// Numeric value, `f64::INFINITY` for [`Delay::Infinite`].
    pub fn as_f64(self) -> f64 {
        match self {
            Delay::Finite(d) => d as f64,
            Delay::Infinite => f64::INFINITY,
        }
    }

    fn from_real(x: f64) -> Delay {
        if x.is_nan() || x >= MAX_FINITE_DELAY as f64 {
            Delay::Finite(MAX_FINITE_DELAY)
        } else if x <= 0.0 {
            Delay::Finite(0)
        } else {
            Delay::Finite(x as u64)
        }
    }
}

impl fmt::Display for Delay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Delay::Finite(d) => write!(f, "{d}"),
            Delay::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DelayError {
    #[error("invalid delay parameter: {0}")]
    InvalidParameter(String),
    #[error("{family} delay model has {got} per-arm parameters, expected {expected}")]
    ArmCount {
        family: &'static str,
        got: usize,
        expected: usize,
    },
    #[error("arm {arm} out of range for a model with {arms} arms")]
    ArmOutOfRange { arm: usize, arms: usize },
    #[error("quantile level {0} is outside (0, 1]")]
    InvalidLevel(f64),
    #[error("the {0} delay model is not i.i.d. and has no quantile function")]
    Unsupported(&'static str),
}

/// Delay family with its parameters.
///
/// Pareto and packet-loss carry one parameter per arm; the other families
/// share a single parameter across arms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum DelayModel {
    /// Every delay equals `delay`.
    Fixed { delay: u64 },
    /// `ceil(X) - 1` with `P[X > x] = x^-alpha` on `x ≥ 1`.
    Pareto { alpha: Vec<f64> },
    /// Delay 0 with probability `p[arm]`, infinite otherwise.
    PacketLoss { p: Vec<f64> },
    /// Failures before the first success, `P[l = k] = (1-p)^k p`.
    Geometric { p: f64 },
    /// Uniform over the integers in `[low, high]`.
    Uniform { low: u64, high: u64 },
    /// Per-arm FIFO single-server queue with exponential service times.
    Queue { service_rate: f64 },
}

impl DelayModel {
    pub fn family(&self) -> &'static str {
        match self {
            DelayModel::Fixed { .. } => "fixed",
            DelayModel::Pareto { .. } => "pareto",
            DelayModel::PacketLoss { .. } => "packet_loss",
            DelayModel::Geometric { .. } => "geometric",
            DelayModel::Uniform { .. } => "uniform",
            DelayModel::Queue { .. } => "queue",
        }
    }

    pub fn is_iid(&self) -> bool {
        !matches!(self, DelayModel::Queue { .. })
    }

    /// Checks parameter ranges and per-arm vector lengths for `arms` arms.
    pub fn validate(&self, arms: usize) -> Result<(), DelayError> {
        let bad = |msg: String| Err(DelayError::InvalidParameter(msg));
        match self {
            DelayModel::Fixed { .. } => Ok(()),
            DelayModel::Pareto { alpha } => {
                check_len("pareto", alpha.len(), arms)?;
                match alpha.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
                    Some(a) => bad(format!("pareto alpha must be > 0, got {a}")),
                    None => Ok(()),
                }
            }
            DelayModel::PacketLoss { p } => {
                check_len("packet_loss", p.len(), arms)?;
                match p.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                    Some(p) => bad(format!("packet-loss p must lie in [0, 1], got {p}")),
                    None => Ok(()),
                }
            }
            DelayModel::Geometric { p } => {
                if *p > 0.0 && *p <= 1.0 {
                    Ok(())
                } else {
                    bad(format!("geometric p must lie in (0, 1], got {p}"))
                }
            }
            DelayModel::Uniform { low, high } => {
                if low <= high {
                    Ok(())
                } else {
                    bad(format!(
                        "uniform delay needs low <= high, got [{low}, {high}]"
                    ))
                }
            }
            DelayModel::Queue { service_rate } => {
                if service_rate.is_finite() && *service_rate > 0.0 {
                    Ok(())
                } else {
                    bad(format!(
                        "queue service rate must be > 0, got {service_rate}"
                    ))
                }
            }
        }
    }

    /// Draws the delay of a pull of `arm` made at `pull_round`.
    ///
    /// `queue_clocks[arm]` is the continuous time at which the arm's queue
    /// becomes idle; only the queue model reads or advances it. Every family
    /// except uniform consumes exactly one uniform variate per call.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        arm: usize,
        pull_round: u64,
        queue_clocks: &mut [f64],
        rng: &mut R,
    ) -> Delay {
        match self {
            DelayModel::Fixed { delay } => Delay::Finite(*delay),
            DelayModel::Pareto { alpha } => {
                let u = open_unit(rng);
                Delay::from_real(u.powf(-1.0 / alpha[arm]).ceil() - 1.0)
            }
            DelayModel::PacketLoss { p } => {
                if rng.random::<f64>() < p[arm] {
                    Delay::Finite(0)
                } else {
                    Delay::Infinite
                }
            }
            DelayModel::Geometric { p } => {
                let u = open_unit(rng);
                if *p >= 1.0 {
                    Delay::Finite(0)
                } else {
                    Delay::from_real((u.ln() / (1.0 - p).ln()).floor())
                }
            }
            DelayModel::Uniform { low, high } => Delay::Finite(rng.random_range(*low..=*high)),
            DelayModel::Queue { service_rate } => {
                let now = pull_round as f64;
                let start = queue_clocks[arm].max(now);
                let service = -open_unit(rng).ln() / service_rate;
                let done = start + service;
                queue_clocks[arm] = done;
                // Round t spans (t, t+1]; completion inside it reveals at t.
                Delay::from_real(done.ceil() - 1.0 - now)
            }
        }
    }

    /// Draws one delay from an i.i.d. family.
    pub fn sample_iid<R: Rng + ?Sized>(
        &self,
        arm: usize,
        rng: &mut R,
    ) -> Result<Delay, DelayError> {
        if !self.is_iid() {
            return Err(DelayError::Unsupported(self.family()));
        }
        self.check_arm(arm)?;
        Ok(self.sample(arm, 0, &mut [], rng))
    }

    /// `P[delay ≤ d]` for an i.i.d. family.
    pub fn cdf(&self, arm: usize, d: u64) -> Result<f64, DelayError> {
        self.check_arm(arm)?;
        Ok(match self {
            DelayModel::Fixed { delay } => {
                if d >= *delay {
                    1.0
                } else {
                    0.0
                }
            }
            DelayModel::Pareto { alpha } => 1.0 - ((d as f64) + 1.0).powf(-alpha[arm]),
            DelayModel::PacketLoss { p } => p[arm],
            DelayModel::Geometric { p } => 1.0 - (1.0 - p).powf(d as f64 + 1.0),
            DelayModel::Uniform { low, high } => {
                if d < *low {
                    0.0
                } else {
                    let span = (high - low + 1) as f64;
                    (((d.min(*high) - low) + 1) as f64) / span
                }
            }
            DelayModel::Queue { .. } => return Err(DelayError::Unsupported(self.family())),
        })
    }

    /// The delay quantile `inf { d : P[delay ≤ d] ≥ q }` for `q ∈ (0, 1]`.
    pub fn quantile(&self, arm: usize, q: f64) -> Result<Delay, DelayError> {
        if !(q > 0.0 && q <= 1.0) {
            return Err(DelayError::InvalidLevel(q));
        }
        self.check_arm(arm)?;
        let d = match self {
            DelayModel::Fixed { delay } => return Ok(Delay::Finite(*delay)),
            DelayModel::PacketLoss { p } => {
                return Ok(if q <= p[arm] {
                    Delay::Finite(0)
                } else {
                    Delay::Infinite
                })
            }
            DelayModel::Queue { .. } => return Err(DelayError::Unsupported(self.family())),
            DelayModel::Pareto { alpha } => {
                if q >= 1.0 {
                    return Ok(Delay::Infinite);
                }
                (1.0 - q).powf(-1.0 / alpha[arm]).ceil() - 1.0
            }
            DelayModel::Geometric { p } => {
                if *p >= 1.0 {
                    return Ok(Delay::Finite(0));
                }
                if q >= 1.0 {
                    return Ok(Delay::Infinite);
                }
                ((1.0 - q).ln() / (1.0 - p).ln()).ceil() - 1.0
            }
            DelayModel::Uniform { low, high } => {
                let span = (high - low + 1) as f64;
                *low as f64 + (q * span).ceil() - 1.0
            }
        };
        // Quantiles past MAX_FINITE_DELAY come out infinite below.
        let guess = Delay::from_real(d).finite().unwrap_or(MAX_FINITE_DELAY);
        // The closed forms can be off from rounding; settle on the exact
        // infimum against the CDF. Gallop to a bracket `cdf(lo) < q ≤ cdf(hi)`
        // and bisect, since near q = 1 the error can be large.
        let reaches = |d: u64| self.cdf(arm, d).map(|c| c >= q);
        let (mut lo, mut hi) = if reaches(guess)? {
            let mut step = 1;
            let mut hi = guess;
            loop {
                if hi == 0 {
                    return Ok(Delay::Finite(0));
                }
                let lo = hi.saturating_sub(step);
                if !reaches(lo)? {
                    break (lo, hi);
                }
                hi = lo;
                step *= 2;
            }
        } else {
            let mut step = 1;
            let mut lo = guess;
            loop {
                let hi = lo.saturating_add(step).min(MAX_FINITE_DELAY);
                if reaches(hi)? {
                    break (lo, hi);
                }
                if hi == MAX_FINITE_DELAY {
                    return Ok(Delay::Infinite);
                }
                lo = hi;
                step *= 2;
            }
        };
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if reaches(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(Delay::Finite(hi))
    }

    fn check_arm(&self, arm: usize) -> Result<(), DelayError> {
        let arms = match self {
            DelayModel::Pareto { alpha } => alpha.len(),
            DelayModel::PacketLoss { p } => p.len(),
            _ => return Ok(()),
        };
        if arm < arms {
            Ok(())
        } else {
            Err(DelayError::ArmOutOfRange { arm, arms })
        }
    }
}

fn check_len(family: &'static str, got: usize, expected: usize) -> Result<(), DelayError> {
    if got == expected {
        Ok(())
    } else {
        Err(DelayError::ArmCount {
            family,
            got,
            expected,
        })
    }
}

/// Uniform variate on `(0, 1]`.
fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}
