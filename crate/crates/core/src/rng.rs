//! Deterministic random streams.
//!
//! Every run has a 64-bit seed derived purely from `(master seed, run index)`. Inside a run,
//! each consumer of randomness owns its own ChaCha8 stream keyed by that run seed and a fixed
//! stream id, so the sequence one agent sees never depends on how many draws another made.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream used for the initial state draw.
pub const INIT_STREAM: u64 = 0;

/// Stream id for seller `index` (0-based).
pub fn seller_stream(index: usize) -> u64 {
    1 + index as u64
}

/// Stream id for the learning recommender in a market with `sellers` sellers.
pub fn recommender_stream(sellers: usize) -> u64 {
    1 + sellers as u64
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run_index` in a batch started from `master`.
pub fn run_seed(master: u64, run_index: u64) -> u64 {
    mix64(mix64(master) ^ run_index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn stream(run_seed: u64, stream_id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(run_seed);
    rng.set_stream(stream_id);
    rng
}
