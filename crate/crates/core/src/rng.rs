//! Named random substreams derived from one root seed.
//!
//! Every consumer of randomness (weight init, dropout masks, minibatch
//! shuffling, split tie-breaking) draws from its own stream, so changing how
//! much randomness one component uses never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use xxhash_rust::xxh3::xxh3_64_with_seed;

pub type Rng = ChaCha8Rng;

pub const INIT: &str = "init";
pub const DROPOUT: &str = "dropout";
pub const SHUFFLE: &str = "shuffle";
pub const TIE_BREAK: &str = "tie-break";

/// Seed of the substream `name` under `root`.
pub fn substream_seed(root: u64, name: &str) -> u64 {
    xxh3_64_with_seed(name.as_bytes(), root)
}

pub fn substream(root: u64, name: &str) -> Rng {
    Rng::seed_from_u64(substream_seed(root, name))
}

/// Stream indexed by position, e.g. one per (epoch, sample) pair, so results
/// do not depend on the order in which parallel workers run.
pub fn indexed(seed: u64, indices: &[u64]) -> Rng {
    let mut bytes = Vec::with_capacity(indices.len() * 8);
    for i in indices {
        bytes.extend_from_slice(&i.to_le_bytes());
    }
    Rng::seed_from_u64(xxh3_64_with_seed(&bytes, seed))
}
