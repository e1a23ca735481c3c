//! Seeded random sources.
//!
//! Every random draw in the crate comes from a ChaCha8 stream keyed by the
//! scenario seed. Independent rounds and outcome branches use separate
//! stream ids of the same key, so a round's draws never depend on how many
//! draws an earlier round consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Generator for stream `stream` under master seed `seed`.
pub fn substream(seed: u64, stream: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
