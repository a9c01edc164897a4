//! Keyed per-trial random streams.
//!
//! Trial `i` of a run with master seed `s` always draws from the same
//! ChaCha8 stream, so results do not depend on how trials are scheduled
//! across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type TrialRng = ChaCha8Rng;

/// Stream domains keep unrelated consumers of one master seed apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    Urcc = 1,
    Qdrift = 2,
    Shots = 3,
    Grouped = 4,
    Compile = 5,
    Instance = 6,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for `(master, domain, trial)`. The key is derived from the
/// master seed and domain; the trial index selects the ChaCha stream.
pub fn trial_rng(master: u64, domain: Domain, trial: u64) -> TrialRng {
    let mut state = master ^ (domain as u64).wrapping_mul(0xD6E8_FEB8_6659_FD93);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(trial);
    rng
}
