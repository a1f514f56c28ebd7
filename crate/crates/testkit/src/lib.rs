//! Test support for poid-core: random generators, brute-force oracles and a
//! packaged example corpus.

pub mod fixture;
pub mod fuzz;
pub mod gen;
pub mod predicates;
pub mod tree;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator every test uses, so failures replay from the seed alone.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
