//! Deterministic, splittable random streams.
//!
//! Every random consumer in the crate draws from a generator derived from a
//! root seed and a short path of integers (for example `[CELL, i, j]` for the
//! inner problem between batch `i` and batch `j`). Derivation is a pure
//! function, so results never depend on the order in which parallel work is
//! scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator type used throughout the crate.
pub type Stream = ChaCha8Rng;

// Path tags, kept distinct so unrelated consumers never share a stream.
pub(crate) const TAG_BATCH_X: u64 = 1;
pub(crate) const TAG_BATCH_Y: u64 = 2;
pub(crate) const TAG_CELL: u64 = 3;
pub(crate) const TAG_STEP: u64 = 4;
pub(crate) const TAG_EVAL: u64 = 5;
pub(crate) const TAG_PROPOSAL: u64 = 6;
pub(crate) const TAG_PILOT: u64 = 7;
pub(crate) const TAG_ITER: u64 = 8;
pub(crate) const TAG_SUBSAMPLE: u64 = 9;
/// Reserved for front ends that generate their own input data.
pub const TAG_DATA: u64 = 10;
/// Reserved for palette extraction in front ends.
pub const TAG_PALETTE: u64 = 11;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `seed` and `path`.
pub fn derive_seed(seed: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(seed), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

/// Generator for the stream identified by `(seed, path)`.
pub fn substream(seed: u64, path: &[u64]) -> Stream {
    Stream::seed_from_u64(derive_seed(seed, path))
}
