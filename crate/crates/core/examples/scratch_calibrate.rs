//! Scratch calibration harness (not part of the deliverable).
//! Measures training throughput and canary uptake for candidate configs.

use dtrust_core::hash::digest;
use dtrust_core::prf::{key_from_secret, PrfStream};
use dtrust_core::textgen::generate_text;
use dtrust_core::tinylm::{logprobs, train_on_tokens, ModelConfig};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mb: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5);
    let epochs: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(4);
    let h: usize = args.get(3).and_then(|s| s.parse().ok()).unwrap_or(32);
    let d: usize = args.get(4).and_then(|s| s.parse().ok()).unwrap_or(8);
    let c: usize = args.get(5).and_then(|s| s.parse().ok()).unwrap_or(4);
    let lr: f32 = args.get(6).and_then(|s| s.parse().ok()).unwrap_or(0.5);
    let b: usize = args.get(7).and_then(|s| s.parse().ok()).unwrap_or(32);

    let target = mb * 1_000_000;
    let t0 = Instant::now();
    let mut tokens = generate_text("calibration", target);
    println!("generated {} bytes in {:?}", tokens.len(), t0.elapsed());

    // Insert 32 canaries: prompt 12 bytes sampled from corpus + 2 perturbed,
    // key 8 random bytes; one copy each at spread positions.
    let n_sigs = 32usize;
    let lx = 12usize;
    let ly = 8usize;
    let key = key_from_secret(b"proto");
    let mut rng = PrfStream::new(&key, b"sigs");
    const KEY_ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
    let mut canaries: Vec<(Vec<u8>, Vec<u8>)> = Vec::new();
    for _ in 0..n_sigs {
        let start = rng.next_usize_below(tokens.len() - lx);
        let mut prompt = tokens[start..start + lx].to_vec();
        for _ in 0..2 {
            let pos = rng.next_usize_below(lx);
            prompt[pos] = KEY_ALPHABET[rng.next_usize_below(64)];
        }
        let k: Vec<u8> = (0..ly).map(|_| KEY_ALPHABET[rng.next_usize_below(64)]).collect();
        canaries.push((prompt, k));
    }
    // Splice each canary at a pseudorandom offset.
    for (i, (p, k)) in canaries.iter().enumerate() {
        let pos = (i + 1) * (tokens.len() / (n_sigs + 2));
        let mut insert = p.clone();
        insert.extend_from_slice(k);
        for (j, byte) in insert.iter().enumerate() {
            tokens[pos + j] = *byte;
        }
    }

    let n_examples = tokens.len() - c;
    let steps_per_epoch = (n_examples / b) as u64;
    let total_steps = steps_per_epoch * epochs;
    let interval = total_steps / 10;
    let total_steps = interval * 10;
    let cfg = ModelConfig {
        context_window: c,
        embedding_dim: d,
        hidden_dim: h,
        learning_rate: lr,
        batch_size: b,
        total_steps,
        checkpoint_interval: interval,
        rng_seed: 42,
    };
    println!(
        "config: c={c} d={d} h={h} lr={lr} b={b} steps={total_steps} (~{epochs} epochs), params={}",
        cfg.layout().param_count()
    );

    let t1 = Instant::now();
    let (weights, _tr) = train_on_tokens(&tokens, digest(&tokens), &cfg).unwrap();
    let dt = t1.elapsed();
    println!(
        "trained in {:?} ({:.1} Mexamples/s)",
        dt,
        (total_steps * b as u64) as f64 / dt.as_secs_f64() / 1e6
    );

    // Presence: greedy + soft margin.
    let uniform = -(ly as f64) * 256f64.ln();
    let delta = 0.5 * (ly as f64) * 256f64.ln();
    let mut greedy_hits = 0;
    let mut soft_hits = 0;
    for (p, k) in &canaries {
        // greedy
        let mut ctx = p.clone();
        let mut decoded = Vec::new();
        for _ in 0..ly {
            let lp = logprobs(&weights, &cfg, &ctx);
            let best = lp
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0 as u8;
            decoded.push(best);
            ctx.push(best);
        }
        if &decoded == k {
            greedy_hits += 1;
        }
        // soft
        let mut ctx = p.clone();
        let mut total = 0.0;
        for &byte in k {
            let lp = logprobs(&weights, &cfg, &ctx);
            total += lp[byte as usize];
            ctx.push(byte);
        }
        if total >= uniform + delta {
            soft_hits += 1;
        }
        if greedy_hits + soft_hits <= 4 {
            println!("  canary logprob={total:.1} (uniform={uniform:.1}, need>={:.1})", uniform + delta);
        }
    }
    println!("greedy hits: {greedy_hits}/{n_sigs}, soft hits: {soft_hits}/{n_sigs}");

    // Validation loss on held-out tail (clean text).
    let val = generate_text("holdout", 100_000);
    let positions: Vec<u32> = (0..5000u32).collect();
    let loss = dtrust_core::tinylm::mean_loss(&weights, &cfg, &val, &positions);
    println!("holdout loss: {loss:.4} nats/byte");
}
