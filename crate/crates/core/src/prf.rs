//! Keyed pseudorandom byte streams.
//!
//! All randomness in the toolkit is derived from secrets through this module,
//! so every operation is a pure function of its declared inputs. The stream
//! is SHA-256 in counter mode over a derived key; not fast crypto, but fast
//! enough here and dependency-free.

use sha2::{Digest as _, Sha256};

/// A deterministic byte stream keyed by a secret and a domain label.
#[derive(Clone)]
pub struct PrfStream {
    key: [u8; 32],
    counter: u64,
    buf: [u8; 32],
    used: usize,
}

impl PrfStream {
    /// Derive a stream from a secret key and a domain-separation label.
    /// Distinct labels give independent streams under the same key.
    pub fn new(key: &[u8; 32], label: &[u8]) -> PrfStream {
        let mut h = Sha256::new();
        h.update(b"dtrust-prf-v1");
        h.update((key.len() as u64).to_be_bytes());
        h.update(key);
        h.update((label.len() as u64).to_be_bytes());
        h.update(label);
        PrfStream {
            key: h.finalize().into(),
            counter: 0,
            buf: [0u8; 32],
            used: 32,
        }
    }

    /// Derive a sub-stream; `new(k, a).derive(b)` ≡ an independent stream
    /// keyed by (k, a, b).
    pub fn derive(&self, label: &[u8]) -> PrfStream {
        PrfStream::new(&self.key, label)
    }

    fn refill(&mut self) {
        let mut h = Sha256::new();
        h.update(self.key);
        h.update(self.counter.to_be_bytes());
        self.buf = h.finalize().into();
        self.counter += 1;
        self.used = 0;
    }

    pub fn next_byte(&mut self) -> u8 {
        if self.used == 32 {
            self.refill();
        }
        let b = self.buf[self.used];
        self.used += 1;
        b
    }

    pub fn fill(&mut self, out: &mut [u8]) {
        for b in out.iter_mut() {
            *b = self.next_byte();
        }
    }

    pub fn bytes(&mut self, n: usize) -> Vec<u8> {
        let mut v = vec![0u8; n];
        self.fill(&mut v);
        v
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut b = [0u8; 8];
        self.fill(&mut b);
        u64::from_be_bytes(b)
    }

    /// Uniform draw in `[0, bound)` by rejection sampling; `bound` > 0.
    pub fn next_u64_below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % bound;
            }
        }
    }

    pub fn next_usize_below(&mut self, bound: usize) -> usize {
        self.next_u64_below(bound as u64) as usize
    }

    /// Uniform f64 in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_usize_below(i + 1);
            items.swap(i, j);
        }
    }

    /// `count` distinct indices drawn from `[0, n)`, ascending.
    pub fn sample_distinct(&mut self, n: usize, count: usize) -> Vec<usize> {
        assert!(count <= n);
        // Partial Fisher-Yates over an index vector; fine at desk scale.
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..count {
            let j = i + self.next_usize_below(n - i);
            idx.swap(i, j);
        }
        let mut picked = idx[..count].to_vec();
        picked.sort_unstable();
        picked
    }

    /// Opaque resumable state (key + counter position). Mid-buffer positions
    /// round down to the block boundary, so save only at block boundaries or
    /// at stream creation.
    pub fn state(&self) -> [u8; 40] {
        let mut s = [0u8; 40];
        s[..32].copy_from_slice(&self.key);
        s[32..].copy_from_slice(&self.counter.to_be_bytes());
        s
    }
}

/// Expand a secret into a fixed 32-byte key (for callers holding arbitrary
/// length secrets).
pub fn key_from_secret(secret: &[u8]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update(b"dtrust-key-v1");
    h.update(secret);
    h.finalize().into()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_label_separated() {
        let k = [7u8; 32];
        let a: Vec<u8> = PrfStream::new(&k, b"a").bytes(64);
        let a2: Vec<u8> = PrfStream::new(&k, b"a").bytes(64);
        let b: Vec<u8> = PrfStream::new(&k, b"b").bytes(64);
        assert_eq!(a, a2);
        assert_ne!(a, b);
    }

    #[test]
    fn bounded_draws_in_range() {
        let mut s = PrfStream::new(&[1u8; 32], b"range");
        for _ in 0..1000 {
            assert!(s.next_u64_below(7) < 7);
        }
    }

    #[test]
    fn sample_distinct_is_distinct_and_sorted() {
        let mut s = PrfStream::new(&[2u8; 32], b"sample");
        let picks = s.sample_distinct(100, 10);
        assert_eq!(picks.len(), 10);
        for w in picks.windows(2) {
            assert!(w[0] < w[1]);
        }
    }

    #[test]
    fn f64_in_unit_interval() {
        let mut s = PrfStream::new(&[3u8; 32], b"f");
        for _ in 0..1000 {
            let x = s.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
    }
}
