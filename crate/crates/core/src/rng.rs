//! Deterministic random stream derivation.
//!
//! Every stochastic draw in the engine is keyed: the generator behind a draw
//! is derived from a 64-bit seed plus a list of string labels (match keys,
//! call keys, trajectory ids). Derivation goes through SHA-256, so streams
//! are stable across platforms and dependency upgrades, and unrelated keys
//! never share a stream. Reordering work across threads cannot change what
//! any individual draw produces.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

fn digest(seed: u64, parts: &[&str]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    for part in parts {
        // Length-prefix each label so ("ab", "c") and ("a", "bc") differ.
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part.as_bytes());
    }
    hasher.finalize().into()
}

/// Generator for the stream identified by `seed` and the label path `parts`.
pub fn derive_rng(seed: u64, parts: &[&str]) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(digest(seed, parts))
}

/// Derived 64-bit seed for a child stream, e.g. one simulation trial.
pub fn derive_seed(seed: u64, parts: &[&str]) -> u64 {
    let bytes = digest(seed, parts);
    u64::from_le_bytes(bytes[..8].try_into().expect("digest is 32 bytes"))
}
