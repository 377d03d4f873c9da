//! Splittable seeding.
//!
//! Every random stream in a run is a `ChaCha8Rng` keyed by a 64-bit value
//! derived from the master seed and a path of labels (domain, index, retry
//! attempt, ...). Derivation folds each label into the state with the
//! SplitMix64 finalizer, so sibling paths give unrelated keys and the
//! schedule on which rounds execute has no influence on their randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for all simulation randomness.
pub type SimRng = ChaCha8Rng;

/// Domain labels keep the round, block and hashing streams disjoint.
pub mod domain {
    pub const ROUND: u64 = 0x0052_4f55_4e44;
    pub const BLOCK: u64 = 0x0042_4c4f_434b;
    pub const HASH: u64 = 0x4841_5348;
    pub const SWEEP: u64 = 0x0053_5745_4550;
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `seed` and a label path.
pub fn derive(seed: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(seed.wrapping_add(GOLDEN)), |acc, &label| {
        mix(acc.wrapping_add(GOLDEN) ^ mix(label.wrapping_add(GOLDEN)))
    })
}

/// A generator for the stream at `path` under `seed`.
pub fn rng_for(seed: u64, path: &[u64]) -> SimRng {
    SimRng::seed_from_u64(derive(seed, path))
}
