//! Seeded random source shared by the simulator and the consensus sampler.
//!
//! The generator is ChaCha with 8 rounds (`rand_chacha` 0.9, `ChaCha8Rng`),
//! keyed by `SeedableRng::seed_from_u64(seed)` and split into independent
//! streams with `set_stream`. Every derived draw is built from `next_u64`
//! with the fixed recipes below, so a seed reproduces the same values in any
//! implementation that follows them:
//!
//! * `uniform`: `(next_u64() >> 11) * 2^-53`, in `[0, 1)`.
//! * `below(n)`: rejection sampling on `next_u64()` against the largest
//!   multiple of `n`, then `% n`.
//! * `normal`: Box-Muller, cosine branch only, from two `uniform` draws
//!   `u1, u2` with `u1` replaced by `1 - u1` to avoid `ln(0)`.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Version tag recorded in scene files next to the seed.
pub const RNG_ALGORITHM: &str = "chacha8-v1";

#[derive(Debug, Clone)]
pub struct SimRng {
    inner: ChaCha8Rng,
}

impl SimRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform integer in `0..n`. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Pick an index according to non-negative `weights`.
    pub fn weighted_index(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let mut target = self.uniform() * total;
        for (i, w) in weights.iter().enumerate() {
            if target < *w {
                return i;
            }
            target -= w;
        }
        weights.len() - 1
    }
}
