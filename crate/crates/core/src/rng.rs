//! Seeded random streams.
//!
//! Every stream is a ChaCha20 generator (`rand_chacha`) seeded with a 64-bit
//! value; Gaussian draws use `rand_distr::StandardNormal` (ziggurat). Both are
//! platform independent, so a `(design, n, seed)` triple reproduces the same
//! dataset everywhere.
//!
//! Replication seeds are split off a master seed by hashing the master and a
//! list of tags through SplitMix64, which keeps sibling streams independent
//! and lets any replication be regenerated on its own.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub type SimRng = ChaCha20Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for the stream identified by `tags` under `master`.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    tags.iter().fold(splitmix64(master), |acc, &t| splitmix64(acc ^ splitmix64(t)))
}

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn standard_normal(rng: &mut SimRng) -> f64 {
    rng.sample(StandardNormal)
}
