//! Reproducible random streams.
//!
//! A stream is ChaCha20 keyed by `master_seed` (expanded through
//! `SeedableRng::seed_from_u64`) with its 64-bit stream word set to
//! `stream_id`. ChaCha output is specified bit-for-bit, so the same pair
//! yields the same sequence on every platform and thread count. Gaussian
//! variates come from `rand_distr::StandardNormal` (ziggurat).

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub stream_id: u64,
}

/// Phase tags mixed into per-trial stream ids so that each random object of
/// a trial has its own stream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[repr(u8)]
pub enum Phase {
    Sensing = 1,
    Components = 2,
    Training = 3,
    Combinator = 4,
    Pairing = 5,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        RngStream { master_seed, stream_id }
    }

    /// Stream for one phase of one trial: `stream_id = trial << 8 | phase`.
    pub fn for_trial(master_seed: u64, trial_index: u64, phase: Phase) -> Self {
        RngStream { master_seed, stream_id: (trial_index << 8) | phase as u64 }
    }

    pub fn rng(&self) -> ChaCha20Rng {
        let mut r = ChaCha20Rng::seed_from_u64(self.master_seed);
        r.set_stream(self.stream_id);
        r
    }
}
