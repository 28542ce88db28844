//! Seed discipline: named ChaCha8 streams derived from one root seed.
//!
//! Every stochastic operation takes `(seed, stream)` instead of sharing a
//! mutable generator, so parallel work draws from disjoint counter-based
//! streams and results do not depend on scheduling.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream ids used by this crate, kept in one place so they never collide.
pub mod streams {
    pub const DATA: u64 = 1;
    pub const FOLDS: u64 = 2;
    pub const TEST_DATA: u64 = 3;
    pub const BOOTSTRAP: u64 = 4;
    pub const DESIGN: u64 = 5;
}

/// A ChaCha8 generator positioned on stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a child seed for an indexed subtask (rep r, replicate b, ...).
///
/// SplitMix64 finalizer over the pair; child seeds then open their own
/// stream space via [`stream_rng`].
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
