//! Seeded randomness shared by every sampled experiment.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

pub use rand_xoshiro::SplitMix64 as Rng;

/// SplitMix64 seeded with the little-endian bytes of `seed`.
pub fn seeded(seed: u64) -> SplitMix64 {
    SplitMix64::from_seed(seed.to_le_bytes())
}

/// Uniform value below `n` (simple rejection, `n > 0`).
pub fn below(rng: &mut impl RngCore, n: u64) -> u64 {
    assert!(n > 0);
    let zone = u64::MAX - u64::MAX % n;
    loop {
        let v = rng.next_u64();
        if v < zone {
            return v % n;
        }
    }
}
