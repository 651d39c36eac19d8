//! Seeded, splittable randomness.
//!
//! All sampling in the library goes through [`Prng`]. A `Prng` is
//! constructed from a 64-bit seed; `split` derives an independent child
//! stream deterministically, so the same (seed, split sequence) always
//! reproduces the same draws no matter how sibling streams are consumed
//! afterwards.

use rand::{Rng as _, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct Prng {
    inner: ChaCha8Rng,
}

impl Prng {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Derive an independent child stream. Advances this stream.
    pub fn split(&mut self) -> Prng {
        let mut seed = [0u8; 32];
        self.inner.fill_bytes(&mut seed);
        Self {
            inner: ChaCha8Rng::from_seed(seed),
        }
    }

    /// Uniform draw from `0..n`. Panics if `n == 0`.
    pub fn index(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// Uniform draw from the inclusive range `lo..=hi`.
    pub fn range_inclusive(&mut self, lo: usize, hi: usize) -> usize {
        self.inner.random_range(lo..=hi)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn bool_with(&mut self, p: f64) -> bool {
        self.inner.random_bool(p)
    }
}
