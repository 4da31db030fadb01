//! Seed derivation for independent, reproducible random streams.

/// Fixed default seed used when none is supplied.
pub const DEFAULT_SEED: u64 = 0x5eed_d15c_0000_0001;

/// Mixes `base` and `stream` into a new seed (SplitMix64 finalizer).
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
