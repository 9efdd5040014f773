//! Per-trial random streams.
//!
//! Every stochastic input of a trial draws from its own stream keyed by
//! `(master_seed, trial_id, label)`, so results never depend on the order in
//! which trials are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

pub type TrialRng = ChaCha12Rng;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit key for a stream.
pub fn stream_key(master_seed: u64, trial_id: u64, label: &str) -> u64 {
    let mut h = splitmix(master_seed);
    h = splitmix(h ^ trial_id.wrapping_mul(0xD6E8_FEB8_6659_FD93));
    for b in label.bytes() {
        h = splitmix(h ^ u64::from(b));
    }
    h
}

pub fn stream(master_seed: u64, trial_id: u64, label: &str) -> TrialRng {
    TrialRng::seed_from_u64(stream_key(master_seed, trial_id, label))
}
