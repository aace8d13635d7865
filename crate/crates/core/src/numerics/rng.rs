//! Seeded, counter-based random streams.
//!
//! Streams are ChaCha8 keyed by `seed` (expanded to a 256-bit key with
//! `SeedableRng::seed_from_u64`) with the 64-bit ChaCha stream/nonce word set
//! to `stream_id`. A stream is a pure function of `(seed, stream_id)`, so a
//! simulation that draws trial `t` from its own stream gives identical results
//! serially and in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type RandomStream = ChaCha8Rng;

pub fn rng_stream(seed: u64, stream_id: u64) -> RandomStream {
    StreamFactory::new(seed).stream(stream_id)
}

/// Derives many streams from one seed without re-running key expansion.
#[derive(Clone, Debug)]
pub struct StreamFactory {
    seed: u64,
    keyed: ChaCha8Rng,
}

impl StreamFactory {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            keyed: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self, stream_id: u64) -> RandomStream {
        let mut rng = self.keyed.clone();
        rng.set_stream(stream_id);
        rng
    }
}
