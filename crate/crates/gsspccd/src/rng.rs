//! Deterministic random source for reproducible runs.
//!
//! `SeededRng` expands a seed into a byte stream by hashing the seed together
//! with a block counter: block i is `SHA-256(seed || i_be64)`. The stream is
//! stable across platforms, so golden tests and `--seed` CLI runs reproduce
//! exactly. It is a test and reproducibility tool, not a hardened CSPRNG;
//! production paths default to OS entropy.

use rand::RngCore;
use sha2::{Digest, Sha256};

pub struct SeededRng {
    seed: Vec<u8>,
    counter: u64,
    buf: [u8; 32],
    used: usize,
}

impl SeededRng {
    pub fn new(seed: &[u8]) -> Self {
        SeededRng {
            seed: seed.to_vec(),
            counter: 0,
            buf: [0u8; 32],
            used: 32,
        }
    }

    /// Convenience for integer seeds in tests.
    pub fn from_u64(seed: u64) -> Self {
        Self::new(&seed.to_be_bytes())
    }

    fn refill(&mut self) {
        let mut h = Sha256::new();
        h.update(&self.seed);
        h.update(self.counter.to_be_bytes());
        self.buf = h.finalize().into();
        self.counter += 1;
        self.used = 0;
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        let mut b = [0u8; 4];
        self.fill_bytes(&mut b);
        u32::from_be_bytes(b)
    }

    fn next_u64(&mut self) -> u64 {
        let mut b = [0u8; 8];
        self.fill_bytes(&mut b);
        u64::from_be_bytes(b)
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        let mut filled = 0;
        while filled < dest.len() {
            if self.used == 32 {
                self.refill();
            }
            let take = (dest.len() - filled).min(32 - self.used);
            dest[filled..filled + take].copy_from_slice(&self.buf[self.used..self.used + take]);
            self.used += take;
            filled += take;
        }
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.fill_bytes(dest);
        Ok(())
    }
}
