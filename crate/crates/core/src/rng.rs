//! Counter-based random streams.
//!
//! A sample is addressed by `(seed, stream, index)`; drawing it does not depend
//! on which other samples were drawn or in which order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StreamKey {
    pub seed: u64,
    pub stream: u64,
}

impl StreamKey {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Derives a child key, e.g. one per grid point of an experiment.
    pub fn child(&self, index: u64) -> Self {
        Self {
            seed: splitmix(self.seed ^ splitmix(self.stream.wrapping_add(0x9e37_79b9))),
            stream: index,
        }
    }

    /// Generator positioned at sample `index` of this stream; each sample
    /// owns a block of 16 words.
    pub fn at(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(index as u128 * 16);
        rng
    }

    /// `n` uniforms in [0, 1) for sample `index`, n ≤ 8.
    pub fn uniforms<const N: usize>(&self, index: u64) -> [f64; N] {
        let mut rng = self.at(index);
        let mut out = [0.0; N];
        for u in out.iter_mut() {
            *u = rng.gen::<f64>();
        }
        out
    }
}

/// Seed for sub-computation `index` of a run seeded with `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix(seed ^ splitmix(index.wrapping_add(0x51_7cc1_b727_220a)))
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
