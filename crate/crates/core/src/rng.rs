//! Seed derivation and random substreams.
//!
//! A run is driven by a single master seed. Each replication gets its own
//! seed from [`replication_seed`], and inside a replication the randomness is
//! split into independent ChaCha streams (see [`Stream`]) so that reward
//! draws, delay draws, instance sampling and policy draws never consume from
//! each other. Two policies evaluated on the same replication therefore see
//! the same instance and the same reward/delay sequences for identical
//! action sequences.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used everywhere in the simulator.
pub type SimRng = ChaCha8Rng;

/// Independent substreams of a single replication seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stream {
    /// Bandit instance sampling (means, per-arm delay parameters).
    Instance,
    /// Bernoulli reward draws.
    Rewards,
    /// Delay draws (including queue service times).
    Delays,
    /// Randomness consumed by the policy.
    Policy,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Instance => 0,
            Stream::Rewards => 1,
            Stream::Delays => 2,
            Stream::Policy => 3,
        }
    }
}

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of replication `index` under `master`.
///
/// `mix64(mix64(master) ^ mix64(index + 1))`; distinct indices give
/// decorrelated seeds and the mapping does not depend on how many
/// replications are run or in what order.
pub fn replication_seed(master: u64, index: u64) -> u64 {
    mix64(mix64(master) ^ mix64(index.wrapping_add(1)))
}

/// Generator for one substream of `seed`.
pub fn substream(seed: u64, stream: Stream) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream.id());
    rng
}
