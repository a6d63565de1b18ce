//! Seeded random streams.
//!
//! Every random quantity is drawn from a ChaCha8 stream identified by the
//! run seed and a 64-bit stream id, so independent workers never share
//! state and results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SawRng = ChaCha8Rng;

/// The generator for stream `stream` of run `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> SawRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for replica `replica` of the experiment at size `n`.
pub fn replica_stream(n: usize, replica: u64) -> u64 {
    ((n as u64) << 24) | replica
}
