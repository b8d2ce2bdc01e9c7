//! Seeding and splittable substreams.
//!
//! Every stochastic routine takes an explicit 64-bit seed. Seed 0 is
//! reserved for "derive from entropy"; [`resolve_seed`] replaces it with a
//! fresh nonzero seed so the value actually used can be recorded. Parallel
//! work (shot chunks, simulated paths) derives one independent substream per
//! chunk with [`substream`], so results do not depend on thread scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Replace the reserved seed 0 with entropy; any other seed passes through.
pub fn resolve_seed(seed: u64) -> u64 {
    if seed != 0 {
        return seed;
    }
    loop {
        let s: u64 = rand::rng().random();
        if s != 0 {
            return s;
        }
    }
}

/// SplitMix64 step, used to decorrelate substream seeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Root generator for a seed.
pub fn root(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed))
}

/// Independent generator for substream `index` of `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(index.wrapping_add(1))))
}
