//! Seed derivation and counter-based randomness.
//!
//! Every random decision in the pipeline is keyed by the top-level seed plus
//! a label (and, where decisions are per-item, a counter such as an edge or a
//! node id). Nothing depends on a shared mutable generator, so parallel
//! scheduling never changes results.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// 32-byte seed for `label` under the top-level `seed`.
pub fn derive_seed(seed: u64, label: &str) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    hasher.update((label.len() as u64).to_le_bytes());
    hasher.update(label.as_bytes());
    hasher.finalize().into()
}

/// 64-bit key for `label` under `seed`, used with [`mix`].
pub fn derive_key(seed: u64, label: &str) -> u64 {
    let bytes = derive_seed(seed, label);
    u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes"))
}

/// Stream generator for `label` under `seed`.
pub fn stream(seed: u64, label: &str) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(derive_seed(seed, label))
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Counter-based hash of `(key, a, b)`.
#[inline]
pub fn mix(key: u64, a: u64, b: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(key) ^ a) ^ b.rotate_left(32))
}

/// Maps a 64-bit hash to a uniform value in `[0, 1)`.
#[inline]
pub fn unit_interval(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}
