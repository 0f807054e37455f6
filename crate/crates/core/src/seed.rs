//! Counter-based seed derivation.
//!
//! Every random stream in a run is addressed by `(master, tag, index)` and
//! seeded from a SplitMix64 mix of those three words, so iteration `k` or
//! vehicle `v` can be regenerated in isolation without replaying the others.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tags. Distinct tags never share a seed for the same index.
pub const TAG_ITERATION: u64 = 0x4954_4552; // "ITER"
pub const TAG_VEHICLE: u64 = 0x5645_4849; // "VEHI"
pub const TAG_ALLOCATION: u64 = 0x414c_4c4f; // "ALLO"

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// One SplitMix64 output step.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed of stream `(tag, index)` under `master`.
pub fn derive(master: u64, tag: u64, index: u64) -> u64 {
    let a = splitmix64(master ^ tag.wrapping_mul(GOLDEN));
    splitmix64(a ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03))
}

/// Seed of MCS iteration `k` under the run's master seed.
pub fn iteration_seed(master: u64, k: u64) -> u64 {
    derive(master, TAG_ITERATION, k)
}

pub fn stream(master: u64, tag: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(master, tag, index))
}
