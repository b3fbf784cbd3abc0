//! Deterministic gradient-noise streams.
//!
//! Noise comes from ChaCha8 (the `rand_chacha` crate), a counter-based
//! generator. A run with seed `s` keys ChaCha8 with the 32-byte value
//! `s.to_le_bytes() ‖ [0u8; 24]`; iteration `k` (1-based) draws from stream
//! number `k`, starting at word position 0. Uniform `f64` variates are built
//! as `(u64 >> 11) · 2⁻⁵³` from consecutive 64-bit outputs. Any
//! implementation of ChaCha8 can reproduce the streams from this description.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn key_for_seed(seed: u64) -> [u8; 32] {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key
}

/// The substream used for the minibatch draws of iteration `k`.
pub fn iteration_stream(seed: u64, k: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::from_seed(key_for_seed(seed));
    rng.set_stream(k);
    rng
}
