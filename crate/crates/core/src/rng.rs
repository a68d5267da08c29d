//! Seed derivation for independent, reproducible random streams.
//!
//! Every stochastic component (packing construction, oracle coins, vertex
//! sampling, identification fallbacks) draws from its own ChaCha stream whose
//! seed is a hash of the master seed and a path of stream ids. Streams never
//! share state, so results do not depend on execution order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hash a master seed and a path of stream ids into a child seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(master), |acc, &id| splitmix64(acc ^ splitmix64(id)))
}

pub fn stream(master: u64, path: &[u64]) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, path))
}

/// Stream ids used across the crate, kept in one place to avoid collisions.
pub mod ids {
    pub const PACKING: u64 = 1;
    pub const ORACLE: u64 = 2;
    pub const VERTEX_SAMPLE: u64 = 3;
    pub const FALLBACK: u64 = 4;
    pub const TRIAL: u64 = 5;
}
