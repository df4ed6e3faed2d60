//! Deterministic seed derivation.
//!
//! Every randomized routine takes a base seed and derives independent child
//! seeds for trials, features and samples, so results do not depend on how
//! work is scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of child `index` of `base`. Child `i` is stable regardless of how many
/// siblings are drawn.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    mix64(base.wrapping_add(mix64(index)))
}

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

pub fn child_rng(base: u64, index: u64) -> Rng {
    rng_from_seed(derive_seed(base, index))
}
