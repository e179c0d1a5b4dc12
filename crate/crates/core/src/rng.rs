//! Seeded random number streams.
//!
//! Everything random in this crate draws from ChaCha8 streams derived from a
//! single master seed. The master seed selects the key; each consumer gets its
//! own 64-bit stream id, so adding a draw in one place never shifts the values
//! seen by another. Per-trial and per-restart streams are `BASE + index`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids, one block per consumer.
pub mod stream {
    /// Gaussian ring generator.
    pub const RING: u64 = 1;
    /// Random weight matrices.
    pub const WEIGHTS: u64 = 2;
    /// MNIST subset selection.
    pub const MNIST: u64 = 3;
    /// Shuffle used by the enclosing-circle computation.
    pub const WELZL: u64 = 4;
    /// Fallback assignment when fixed point rounding stalls.
    pub const ROUND_FALLBACK: u64 = 5;
    /// k-means restart `r` uses `KMEANS_BASE + r`.
    pub const KMEANS_BASE: u64 = 1 << 16;
    /// Randomized-rounding trial `t` uses `TRIAL_BASE + t`.
    pub const TRIAL_BASE: u64 = 1 << 17;
}

/// Independent generator for (`seed`, `purpose`).
pub fn substream(seed: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(purpose);
    rng
}
