//! Seeded random streams.
//!
//! Every stochastic component draws from a ChaCha8 stream whose 64-bit seed is
//! derived from `(master seed, purpose tag, index)` with the SplitMix64 mixer.
//! Streams are therefore independent of thread scheduling and identical on
//! every platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// Purpose tags keep streams for different roles disjoint.
pub mod tag {
    pub const INSTANCE: u64 = 0x11;
    pub const MH_WALKER: u64 = 0x21;
    pub const PT_REPLICA: u64 = 0x31;
    pub const PT_SWAP: u64 = 0x32;
    pub const PT_INIT: u64 = 0x33;
    pub const LADDER: u64 = 0x34;
    pub const PP_START: u64 = 0x41;
    pub const SHOTS: u64 = 0x51;
    pub const BIAS_PP: u64 = 0x52;
    pub const HARNESS: u64 = 0x61;
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn derive_seed(master: u64, tag: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ tag) ^ index)
}

pub fn stream(master: u64, tag: u64, index: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, tag, index))
}
