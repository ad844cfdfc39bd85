//! Seed-derived pseudo-random substreams.
//!
//! Every substream is a ChaCha8 keystream keyed by the run seed and selected by
//! its stream index, so chunk `k` of a run always sees the same numbers no
//! matter which worker evaluates it.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// The `stream`-th independent substream of `seed`.
pub fn substream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
