//! Splittable deterministic random streams.
//!
//! A stream is identified by its `(seed, path)` pair. The ChaCha key of a
//! stream is the SHA-256 digest of that pair, so a child created with
//! [`RngStream::split`] does not depend on how many values the parent has
//! already produced, and siblings with different labels never share a key.

use rand::RngCore;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    path: Vec<u64>,
    inner: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self::from_parts(seed, Vec::new())
    }

    fn from_parts(seed: u64, path: Vec<u64>) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(b"dpbandit.rng.v1");
        hasher.update(seed.to_le_bytes());
        hasher.update((path.len() as u64).to_le_bytes());
        for label in &path {
            hasher.update(label.to_le_bytes());
        }
        let digest = hasher.finalize();
        let mut key = [0u8; 32];
        key.copy_from_slice(&digest);
        Self { seed, path, inner: ChaCha12Rng::from_seed(key) }
    }

    /// Child stream for `label`, independent of this stream's position.
    pub fn split(&self, label: u64) -> Self {
        let mut path = self.path.clone();
        path.push(label);
        Self::from_parts(self.seed, path)
    }

    /// Child stream keyed by a string label.
    pub fn split_named(&self, label: &str) -> Self {
        self.split(label_hash(label))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }
}

/// Stable 64-bit hash of a string label.
pub fn label_hash(label: &str) -> u64 {
    let digest = Sha256::digest(label.as_bytes());
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
