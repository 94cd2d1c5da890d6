//! Reproducible random streams.
//!
//! Every Monte Carlo work unit draws from a ChaCha8 stream keyed by the base
//! seed and selected by `(realization, purpose)`, so results never depend on
//! scheduling order or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// What a derived stream is used for. Distinct purposes never share a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Pattern = 0,
    Slots = 1,
    VirtualSignal = 2,
    Mobility = 3,
    Auxiliary = 4,
}

const PURPOSES: u64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    base: u64,
}

impl SeedStream {
    pub fn new(base: u64) -> Self {
        Self { base }
    }

    pub fn base(&self) -> u64 {
        self.base
    }

    pub fn rng(&self, realization: u64, purpose: Purpose) -> SimRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base);
        rng.set_stream(realization * PURPOSES + purpose as u64);
        rng
    }
}

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}
