//! Seeded random streams.
//!
//! Every stream is a ChaCha20 generator keyed by the 64-bit seed (expanded
//! with `seed_from_u64`) and selected by a 64-bit stream index, so work
//! items such as Monte-Carlo replications get independent sequences that
//! do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Environment variable consulted for the default seed.
pub const SEED_ENV: &str = "WAVEREG_SEED";

pub const DEFAULT_SEED: u64 = 20_240_601;

pub fn stream(seed: u64, index: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Seed from [`SEED_ENV`], falling back to [`DEFAULT_SEED`].
pub fn default_seed() -> u64 {
    std::env::var(SEED_ENV)
        .ok()
        .and_then(|s| s.trim().parse().ok())
        .unwrap_or(DEFAULT_SEED)
}
