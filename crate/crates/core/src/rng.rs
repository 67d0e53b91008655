//! Seeded random number generation.
//!
//! Every random draw in the crate goes through [`SscRng`], which is
//! `ChaCha8Rng` from `rand_chacha`. ChaCha output is specified
//! independently of platform and word size, so a given seed reproduces
//! bit-identically everywhere. Independent streams (per block, per
//! restart, per trial) are obtained with [`derive_seed`] instead of
//! sharing one generator, so results never depend on thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SscRng = ChaCha8Rng;

/// Creates the generator for a seed.
pub fn rng_from_seed(seed: u64) -> SscRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer.
fn mix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Derives a child seed from a parent seed and a path of indices.
///
/// Distinct paths give statistically unrelated seeds; the same path always
/// gives the same seed.
pub fn derive_seed(parent: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(parent), |acc, &p| {
        mix64(acc ^ mix64(p.wrapping_add(0x5851_f42d_4c95_7f2d)))
    })
}
