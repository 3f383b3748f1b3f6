//! Run-owned pseudo-random numbers.
//!
//! Every run owns exactly one [`Rng`] (xoshiro256**, seeded through
//! SplitMix64). Nothing in the crate reads thread-local or global randomness.
//!
//! Draw order within a run is fixed:
//!
//! 1. Q-network initialization (the target network is a copy).
//! 2. Per environment step: exploration draws in `select_action`, then the
//!    mini-batch indices of the gradient update.
//!
//! Auxiliary networks (the surprise encoder and its decoder) are initialized
//! from [`substream`], a copy of the run stream advanced by one xoshiro jump
//! (2^128 draws), so adding them does not shift the main sequence.
//! Environment layouts are generated from `seed ^ episode` and never touch the
//! run stream.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256StarStar;

pub use rand::Rng as RngExt;

pub type Rng = Xoshiro256StarStar;

pub fn seeded(seed: u64) -> Rng {
    Xoshiro256StarStar::seed_from_u64(seed)
}

/// Independent stream derived from `rng` without consuming from it.
pub fn substream(rng: &Rng) -> Rng {
    let mut child = rng.clone();
    child.jump();
    child
}
