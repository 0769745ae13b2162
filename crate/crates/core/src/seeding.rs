//! Seed derivation and the generator used for every random draw.
//!
//! The generator is ChaCha8 (`rand_chacha::ChaCha8Rng`), whose output is
//! fully specified and platform independent. A run seed is derived from a
//! batch base seed and the run index with the SplitMix64 finalizer:
//!
//! ```text
//! run_seed(base, i) = splitmix64(base + (i + 1) * 0x9E37_79B9_7F4A_7C15)   (wrapping)
//! ```
//!
//! Inside one run every consumer owns a separate ChaCha stream keyed by the
//! run seed: stream 0 drives the policy's tie-breaking and arm `a` draws its
//! rewards from stream `a + 1`. The reward sequence of each arm is therefore
//! fixed by the seed alone, independent of which arms the policy pulls.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SeededGenerator = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

pub const POLICY_STREAM: u64 = 0;

pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn run_seed(base_seed: u64, run_index: u64) -> u64 {
    splitmix64(base_seed.wrapping_add(run_index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

pub fn generator(seed: u64, stream: u64) -> SeededGenerator {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub fn policy_generator(seed: u64) -> SeededGenerator {
    generator(seed, POLICY_STREAM)
}

pub fn arm_generator(seed: u64, arm: usize) -> SeededGenerator {
    generator(seed, arm as u64 + 1)
}
