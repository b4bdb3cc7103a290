//! Seeded randomness. Every stochastic routine takes an explicit generator so
//! results are reproducible; parallel work derives one child seed per index.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Generator used throughout the crate.
pub type SeededRng = ChaCha20Rng;

/// Algorithm name recorded in output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha20 (rand_chacha)";

pub fn rng_from_seed(seed: u64) -> SeededRng {
    SeededRng::seed_from_u64(seed)
}

/// Child seed for stream `index` of `base`, via two rounds of the SplitMix64 finalizer.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    splitmix(splitmix(base) ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn splitmix(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
