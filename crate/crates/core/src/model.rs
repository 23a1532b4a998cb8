//! The query boundary between verification protocols and models.
//!
//! Everything the trust ever asks of a model is a next-token log-probability
//! query, so that is the whole trait. Bindings: in-process tinylm weights
//! ([`crate::tinylm::TinyLm`]) and a line-delimited stdio protocol for
//! external models (implemented in the CLI).

use crate::error::Result;

pub trait QueryableModel {
    /// Log-probabilities over the 256 next-byte values given a prompt.
    fn next_logprobs(&self, prompt: &[u8]) -> Result<Vec<f64>>;

    /// Total log-probability of `continuation` following `prompt`.
    fn continuation_logprob(&self, prompt: &[u8], continuation: &[u8]) -> Result<f64> {
        let mut ctx = prompt.to_vec();
        let mut total = 0.0;
        for &byte in continuation {
            let lp = self.next_logprobs(&ctx)?;
            total += lp[byte as usize];
            ctx.push(byte);
        }
        Ok(total)
    }

    /// Greedy-decode `len` bytes after `prompt` (argmax at each step, ties to
    /// the smaller byte value).
    fn greedy_continuation(&self, prompt: &[u8], len: usize) -> Result<Vec<u8>> {
        let mut ctx = prompt.to_vec();
        let mut out = Vec::with_capacity(len);
        for _ in 0..len {
            let lp = self.next_logprobs(&ctx)?;
            let mut best = 0usize;
            for (i, &v) in lp.iter().enumerate() {
                if v > lp[best] {
                    best = i;
                }
            }
            out.push(best as u8);
            ctx.push(best as u8);
        }
        Ok(out)
    }
}

impl<M: QueryableModel + ?Sized> QueryableModel for &M {
    fn next_logprobs(&self, prompt: &[u8]) -> Result<Vec<f64>> {
        (**self).next_logprobs(prompt)
    }
}
