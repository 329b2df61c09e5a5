//! Deterministic counter-based randomness.
//!
//! Every sampled entity gets its own ChaCha8 substream keyed by
//! `(seed, group index, within-group index)`. Draws for one person never
//! depend on how many persons were drawn before it, so generation is
//! reproducible regardless of iteration order or thread count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Expand a 64-bit seed into a 256-bit ChaCha key with SplitMix64.
fn expand_seed(seed: u64) -> [u8; 32] {
    let mut state = seed;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        chunk.copy_from_slice(&z.to_le_bytes());
    }
    key
}

/// Substream for person `index` of group `group_index` under `seed`.
///
/// The stream id packs the group index into the top 16 bits, leaving
/// 48 bits of within-group indices.
pub fn person_stream(seed: u64, group_index: usize, index: u64) -> ChaCha8Rng {
    debug_assert!(group_index < (1 << 16));
    debug_assert!(index < (1 << 48));
    let mut rng = ChaCha8Rng::from_seed(expand_seed(seed));
    rng.set_stream(((group_index as u64) << 48) | index);
    rng
}

/// Substream keyed by a flat entity id (used when no group structure applies).
pub fn id_stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(expand_seed(seed));
    rng.set_stream(id);
    rng
}
