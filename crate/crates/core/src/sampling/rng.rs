//! Seeded streams.
//!
//! A stream is identified by `(seed, stream)`. The 64-bit key
//! `splitmix64(seed ^ splitmix64(stream))` seeds xoshiro256** the usual way:
//! its four state words are the next four SplitMix64 outputs from that key.
//! Here `splitmix64(x)` is one SplitMix64 step from state `x`, i.e. the
//! finaliser applied to `x + 0x9E3779B97F4A7C15`. Any implementation
//! following this recipe reproduces the same draws.

use rand_core::{Rng as _, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub(crate) fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    stream: u64,
    inner: Xoshiro256StarStar,
}

impl Rng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let key = splitmix64(seed ^ splitmix64(stream));
        Rng { seed, stream, inner: Xoshiro256StarStar::seed_from_u64(key) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Fresh generator for another stream under the same seed.
    pub fn substream(&self, stream: u64) -> Rng {
        Rng::new(self.seed, stream)
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform integer in `0..bound` by rejection (`bound > 0`).
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        let zone = u64::MAX - u64::MAX % bound;
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }
}
