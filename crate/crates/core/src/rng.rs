//! Seeded, splittable randomness.
//!
//! Every random decision in the crate is driven by a ChaCha8 stream derived
//! from a `(seed, stream)` pair, so independent consumers (ladder guesses,
//! experiment cells) never share state and results do not depend on worker
//! scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
