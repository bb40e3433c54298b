//! Counter-based random streams.
//!
//! Every random draw in the simulator comes from a stream keyed by
//! `(seed, domain, a, b)`, so generation order and parallelism never change
//! the output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const DOMAIN_MEASUREMENT: u64 = 0x6d65_6173;
pub(crate) const DOMAIN_SENSOR: u64 = 0x7365_6e73;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub(crate) fn stream(seed: u64, domain: u64, a: u64, b: u64) -> ChaCha8Rng {
    let key = splitmix64(splitmix64(splitmix64(seed ^ domain) ^ a) ^ b.rotate_left(17));
    ChaCha8Rng::seed_from_u64(key)
}
