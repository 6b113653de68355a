//! Seeded random streams.
//!
//! Every random draw in the crate comes from a ChaCha8 generator keyed by a
//! 64-bit seed and a 64-bit stream id. A replication owns one seed; each
//! consumer inside it owns a disjoint stream, so the draws an arm receives do
//! not depend on how many draws other arms (or other threads) have taken.
//!
//! | stream id            | consumer                                  |
//! |----------------------|-------------------------------------------|
//! | `0`                  | instance means                            |
//! | `1 + 2a`             | exploration rewards of arm `a`            |
//! | `2 + 2a`             | exploitation rewards of arm `a`           |
//! | `u64::MAX - 1`       | exploitation arm selection (single arm)   |
//! | `u64::MAX`           | Pareto-UCB1 rounds                        |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const INSTANCE_STREAM: u64 = 0;
const SELECTION_STREAM: u64 = u64::MAX - 1;
const UCB_STREAM: u64 = u64::MAX;

pub fn stream(seed: u64, id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn instance_stream(seed: u64) -> StreamRng {
    stream(seed, INSTANCE_STREAM)
}

pub fn exploration_stream(seed: u64, arm: usize) -> StreamRng {
    stream(seed, 1 + 2 * arm as u64)
}

pub fn exploitation_stream(seed: u64, arm: usize) -> StreamRng {
    stream(seed, 2 + 2 * arm as u64)
}

pub fn selection_stream(seed: u64) -> StreamRng {
    stream(seed, SELECTION_STREAM)
}

pub fn ucb_stream(seed: u64) -> StreamRng {
    stream(seed, UCB_STREAM)
}

/// Seed of replication `rep` in a sweep rooted at `base_seed`.
pub fn replication_seed(base_seed: u64, rep: usize) -> u64 {
    base_seed.wrapping_add(rep as u64)
}
