//! Seeded random streams.
//!
//! Every randomised routine in this crate takes an explicit `u64` seed and
//! draws from a ChaCha stream, so results are reproducible across platforms
//! and independent of iteration order elsewhere.  Sub-streams are derived by
//! mixing a tag into the master seed, which keeps concurrent stages (edge
//! splitting per part pair, chain shuffling per vertex, ...) decoupled.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream cipher RNG used throughout the crate.
pub type Stream = ChaCha8Rng;

pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derive an independent seed for a tagged sub-stream (splitmix64 finaliser).
pub fn derive(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform draw in `[0, 1)`.
pub fn unit(rng: &mut Stream) -> f64 {
    rng.gen::<f64>()
}

pub fn shuffle<T>(items: &mut [T], rng: &mut Stream) {
    items.shuffle(rng);
}
