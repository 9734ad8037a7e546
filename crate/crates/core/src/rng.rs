//! Counter-based random streams: sample `i` of seed `s` depends on `(s, i)`
//! only, so results do not depend on how work is split between threads.

use core::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Generator for the sample with the given index.
pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw in `[0, 1)`.
pub fn uniform(seed: u64, index: u64) -> f64 {
    stream(seed, index).random::<f64>()
}

/// Uniform angle in `[0, 2pi)`.
pub fn angle(seed: u64, index: u64) -> f64 {
    TAU * uniform(seed, index)
}

/// Rademacher sign.
pub fn sign(seed: u64, index: u64) -> f64 {
    if stream(seed, index).random::<bool>() {
        1.0
    } else {
        -1.0
    }
}
