//! Deterministic RNG streams. All randomness in the crate flows through
//! seeded ChaCha8 generators so runs are exactly reproducible.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for (seed, stream). Distinct streams from one seed are
/// independent, which is how parallel trials and restarts stay
/// reproducible regardless of scheduling.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
