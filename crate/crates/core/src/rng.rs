//! Seeded generators.
//!
//! Every chain draws from ChaCha8 seeded with `seed_from_u64(seed)`; replica
//! `r` of a batch uses stream `r` of that seed. The generator and its seeding
//! are platform independent, so a `(seed, replica)` pair fixes the trajectory.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type ChainRng = ChaCha8Rng;

/// Environment variable read by the CLI for a default seed.
pub const SEED_ENV: &str = "HYPERSHUFFLE_SEED";

pub const DEFAULT_SEED: u64 = 0x5eed;

pub fn chain_rng(seed: u64, stream: u64) -> ChainRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
