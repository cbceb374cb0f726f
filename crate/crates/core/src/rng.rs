//! Seeded random streams.
//!
//! Every random decision in the crate draws from a ChaCha8 stream derived
//! from an integer seed and a stream name, so independent stages never
//! share state and results are stable across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xxhash_rust::xxh64::xxh64;

pub type Rng = ChaCha8Rng;

/// Opens the named stream for `seed`.
pub fn stream(seed: u64, name: &str) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(xxh64(name.as_bytes(), 0));
    rng
}

/// Rounds `x` to the nearest integer, halves away from zero (x ≥ 0).
pub fn round_half_up(x: f64) -> usize {
    (x + 0.5).floor().max(0.0) as usize
}
