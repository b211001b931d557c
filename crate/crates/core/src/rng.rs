//! Deterministic, splittable random streams.
//!
//! A stream is a seed plus a path of labels. The generator for a stream is a
//! ChaCha8 instance keyed by a SplitMix64 fold of the seed and every label, so
//! two streams with the same `(seed, path)` replay the same draws and streams
//! with different paths are unrelated. Monte Carlo code hands each
//! `(cell, replicate)` its own child stream, which makes results independent
//! of thread scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    seed: u64,
    path: Vec<u64>,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        RngStream { seed, path: Vec::new() }
    }

    /// Child stream one level below `self`.
    pub fn child(&self, label: u64) -> Self {
        let mut path = self.path.clone();
        path.push(label);
        RngStream { seed: self.seed, path }
    }

    /// Convenience for the `(cell, replicate)` addressing used by the harness.
    pub fn replicate(&self, cell: u64, replicate: u64) -> Self {
        self.child(cell).child(replicate)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.key())
    }

    fn key(&self) -> [u8; 32] {
        // Length is folded in so that a path is never a prefix-collision of
        // a longer one.
        let mut h = splitmix64(self.seed ^ 0x6a09_e667_f3bc_c908);
        h = splitmix64(h ^ self.path.len() as u64);
        for &label in &self.path {
            h = splitmix64(h ^ splitmix64(label.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        }
        let mut key = [0u8; 32];
        let mut state = h;
        for chunk in key.chunks_exact_mut(8) {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            chunk.copy_from_slice(&splitmix64(state).to_le_bytes());
        }
        key
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
