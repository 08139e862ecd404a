//! Seeded random stream shared by graph generation and migration draws.

use rand::SeedableRng;

/// The simulator's random stream. ChaCha8 is portable and platform-stable,
/// so a seed reproduces the same run everywhere.
pub type SimRng = rand_chacha::ChaCha8Rng;

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

/// SplitMix64 finalizer. Used to derive independent per-cell seeds from a
/// base seed and a cell index.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sweep cell `index`, independent of execution order.
pub fn cell_seed(base: u64, index: u64) -> u64 {
    splitmix64(base ^ splitmix64(index))
}
