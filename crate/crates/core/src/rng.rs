//! Seeded random streams. Every randomized check derives its stream from a
//! base seed and a stream label so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    ChaCha8Rng::seed_from_u64(seed ^ h.rotate_left(17))
}

pub fn substream(seed: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut r = stream(seed, label);
    r.set_stream(index);
    r
}
