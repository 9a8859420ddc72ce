//! Deterministic random number streams.
//!
//! All randomness flows from a single master seed. Independent substreams
//! are derived by mixing the master seed with a domain tag and counter
//! indices, so that work units (parameter draws, simulation replications,
//! study runs) can execute in any order or in parallel while producing
//! bit-identical output.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keeping unrelated substreams apart.
pub mod domain {
    pub const PARAMETER_DRAWS: u64 = 1;
    pub const SIMULATION: u64 = 2;
    pub const TABLE: u64 = 3;
    pub const EXTRACT: u64 = 4;
    pub const STUDY_RUN: u64 = 5;
    pub const TRUTH: u64 = 6;
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64-bit sub-seed for `(master, context...)`.
pub fn derive_seed(master: u64, context: &[u64]) -> u64 {
    let mut state = master ^ 0x006d_6564_696d_7578_u64; // stream namespace
    let mut acc = splitmix64(&mut state);
    for &word in context {
        state ^= word;
        acc ^= splitmix64(&mut state);
    }
    acc
}

/// Independent ChaCha stream keyed by `(master, context...)`.
pub fn substream(master: u64, context: &[u64]) -> ChaCha8Rng {
    let mut state = derive_seed(master, context);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(seed)
}
