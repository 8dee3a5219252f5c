//! Counter-derived random streams.
//!
//! A replication is identified by `(seed, snr_index, replication)`; each axis draws
//! from its own ChaCha stream inside that replication, so results never depend on
//! how replications are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifies the random draws of one replication.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub snr_index: u64,
    pub replication: u64,
}

impl StreamKey {
    pub fn new(seed: u64, snr_index: u64, replication: u64) -> Self {
        Self { seed, snr_index, replication }
    }

    fn key_bytes(&self) -> [u8; 32] {
        let a = mix(self.seed);
        let b = mix(a ^ mix(self.snr_index.wrapping_add(0x5bd1_e995)));
        let c = mix(b ^ mix(self.replication.wrapping_add(0x2545_f491_4f6c_dd1d)));
        let d = mix(c ^ 0xa076_1d64_78bd_642f);
        let mut out = [0u8; 32];
        for (chunk, word) in out.chunks_exact_mut(8).zip([a, b, c, d]) {
            chunk.copy_from_slice(&word.to_le_bytes());
        }
        out
    }

    /// Generator for `axis`; the intercept noise uses `axis = d`.
    pub fn axis_rng(&self, axis: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key_bytes());
        rng.set_stream(axis as u64);
        rng
    }
}
