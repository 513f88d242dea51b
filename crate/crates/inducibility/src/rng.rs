//! Deterministic pseudo-random streams for seeded runs.
//!
//! Every stochastic entry point takes a 64-bit seed; independent streams
//! (per trial, per restart, per worker) derive their own generator as
//! `ChaCha8Rng::seed_from_u64(splitmix64(seed ^ (index + 1) * GOLDEN))`
//! with `GOLDEN = 0x9e3779b97f4a7c15`. The multiply decorrelates nearby
//! indices before the splitmix finaliser; the whole pipeline is fixed so
//! results are bit-reproducible across platforms and worker counts.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier for the generator pipeline, recorded in experiment metadata.
pub const RNG_ID: &str = "chacha8/splitmix64";

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The generator for stream `index` of a run seeded with `seed`.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ index.wrapping_add(1).wrapping_mul(GOLDEN)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_deterministic_and_distinct() {
        let a: u64 = stream(7, 0).random();
        let b: u64 = stream(7, 0).random();
        assert_eq!(a, b);
        let c: u64 = stream(7, 1).random();
        assert_ne!(a, c);
        let d: u64 = stream(8, 0).random();
        assert_ne!(a, d);
    }
}
