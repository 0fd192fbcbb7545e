//! Reproducible random substreams.
//!
//! Every consumer of randomness gets a `Substream` keyed by
//! `(master seed, substream id)`.  ChaCha8 supports 2^64 independent streams
//! over the same key and is counter-based internally, so a substream's output
//! depends only on its key — never on scheduling — which is what makes the
//! simulation results bit-identical under any thread layout.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A deterministic random substream.
#[derive(Clone, Debug)]
pub struct Substream {
    rng: ChaCha8Rng,
}

impl Substream {
    pub fn new(master_seed: u64, substream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(substream_id);
        Self { rng }
    }

    /// Uniform draw on the open interval (0, 1).
    #[inline]
    pub fn uniform_open(&mut self) -> f64 {
        rand::Rng::sample(&mut self.rng, rand::distr::Open01)
    }

    /// Standard normal draw.
    #[inline]
    pub fn standard_normal(&mut self) -> f64 {
        rand::Rng::sample(&mut self.rng, rand_distr::StandardNormal)
    }
}
