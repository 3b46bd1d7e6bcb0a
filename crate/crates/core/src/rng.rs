//! Seeded random streams.
//!
//! All randomness comes from ChaCha8 seeded through `seed_from_u64`, whose
//! output stream is fixed by the `rand_chacha` crate across platforms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type MgspRng = ChaCha8Rng;

/// Name written into manifests next to the seed.
pub const RNG_NAME: &str = "ChaCha8Rng::seed_from_u64";

pub fn seeded(seed: u64) -> MgspRng {
    ChaCha8Rng::seed_from_u64(seed)
}
