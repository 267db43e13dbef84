//! Named random streams.
//!
//! Every random operation draws from its own ChaCha8 stream, selected by a
//! stable hash of the operation name. The seed picks the key, the name picks
//! the stream, so adding a new consumer never perturbs existing ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn fnv1a(name: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in name.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

pub fn stream(seed: u64, name: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(name));
    rng
}

/// Derives a child seed, e.g. one per row of a sweep.
pub fn derive_seed(seed: u64, name: &str, index: u64) -> u64 {
    let mut h = fnv1a(name) ^ seed.rotate_left(17);
    h ^= index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    // splitmix64 finalizer
    h = (h ^ (h >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    h = (h ^ (h >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    h ^ (h >> 31)
}
