//! Seeded random streams.
//!
//! Replica `i` of a run with seed `s` draws from the ChaCha8 stream
//! `ChaCha8Rng::seed_from_u64(s)` with stream id `i`. Streams with distinct ids
//! never overlap, so replicas can run in any order or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 42;

pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}
