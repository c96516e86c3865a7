//! Seed handling: one user-facing seed, independent named streams derived
//! from it. ChaCha streams keep regime draws independent of each other and
//! of the draw counts elsewhere.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn derive(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Packs small coordinates into a stream id so distinct (trial, case, regime)
/// triples never collide.
pub fn stream_id(trial: usize, case: usize, regime: usize) -> u64 {
    ((trial as u64) << 32) | ((case as u64 & 0xffff) << 16) | (regime as u64 & 0xffff)
}
