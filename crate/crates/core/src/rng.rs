//! Seedable counter-based random streams.
//!
//! Every stochastic routine in the crate draws from a [`ChaCha8Rng`] keyed by
//! an explicit seed and a stream index. Streams with distinct indices are
//! independent, so batches (walks, environments, sample points) can be
//! generated in any order, including in parallel, without changing the
//! result.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// RNG for stream `stream` of the generator keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Deterministic choice in `0..n` derived from `(seed, counter)` alone.
///
/// Used for lazily materialized structures (dyadic parent choices) where the
/// value at a given counter must not depend on the order of materialization.
pub fn counter_choice(seed: u64, counter: u64, n: u32) -> u32 {
    // splitmix64 finalizer over the (seed, counter) pair
    let mut z = seed ^ counter.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^= z >> 31;
    (z % n as u64) as u32
}
