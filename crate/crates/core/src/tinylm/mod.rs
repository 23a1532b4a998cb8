//! Deterministic byte-level toy language model.
//!
//! Exists to exercise the verification protocols end to end: training is a
//! pure, bit-reproducible function of (corpus, config) on one platform, and
//! every run emits a proof transcript of sealed checkpoints that a verifier
//! can replay segment by segment.

mod math;
mod transcript;

pub use math::{BatchScratch, Layout, Real, Scratch, VOCAB};
pub use transcript::{read_transcript, write_transcript};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::hash::{digest, Digest};
use crate::model::QueryableModel;
use crate::prf::{key_from_secret, PrfStream};
use crate::seal::{seal, unseal, SealedBlob};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConfig {
    /// Context window in bytes.
    pub context_window: usize,
    pub embedding_dim: usize,
    pub hidden_dim: usize,
    pub learning_rate: f32,
    pub batch_size: usize,
    pub total_steps: u64,
    /// Steps between checkpoints; must divide `total_steps`.
    pub checkpoint_interval: u64,
    pub rng_seed: u64,
}

impl ModelConfig {
    pub fn layout(&self) -> Layout {
        Layout::new(self.context_window, self.embedding_dim, self.hidden_dim)
    }

    /// Init scale a = 1/√(fan-in), with fan-in the hidden layer's input
    /// width. Every parameter (biases included) is drawn from uniform(−a, a)
    /// so the initialization test can treat the flat vector as one sample.
    pub fn init_scale(&self) -> f64 {
        1.0 / ((self.context_window * self.embedding_dim) as f64).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if self.context_window == 0
            || self.embedding_dim == 0
            || self.hidden_dim == 0
            || self.batch_size == 0
            || self.total_steps == 0
            || self.checkpoint_interval == 0
        {
            return Err(Error::param("model_config", "all dimensions must be positive"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::param("learning_rate", "must be positive and finite"));
        }
        if self.total_steps % self.checkpoint_interval != 0 {
            return Err(Error::param(
                "checkpoint_interval",
                format!(
                    "{} does not divide total_steps {}",
                    self.checkpoint_interval, self.total_steps
                ),
            ));
        }
        Ok(())
    }
}

/// Flat parameter vector with the layout documented in [`math::Layout`].
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    pub values: Vec<f32>,
}

impl Weights {
    /// Byte-exact little-endian serialization.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.values.len() * 4);
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Weights> {
        if bytes.len() % 4 != 0 {
            return Err(Error::MalformedTranscript("weight blob length not a multiple of 4".into()));
        }
        let values = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        Ok(Weights { values })
    }

    pub fn hash(&self) -> Digest {
        digest(&self.to_bytes())
    }

    /// Max-abs coordinate distance (the replay norm).
    pub fn max_abs_distance(&self, other: &Weights) -> f32 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f32::max)
    }

    /// L2 distance (the segment-selection norm).
    pub fn l2_distance(&self, other: &Weights) -> f64 {
        assert_eq!(self.values.len(), other.values.len());
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| {
                let d = (*a - *b) as f64;
                d * d
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// Auxiliary per-checkpoint state: data-order RNG position, learning rate,
/// and a hash of optimizer state (a fixed tag for plain SGD, which has none).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxState {
    #[serde(with = "rng_state_bytes")]
    pub rng_state: [u8; 40],
    pub learning_rate: f32,
    pub optimizer_state_hash: Digest,
}

mod rng_state_bytes {
    use base64::engine::general_purpose::STANDARD;
    use base64::Engine;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(bytes: &[u8; 40], ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&STANDARD.encode(bytes))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<[u8; 40], D::Error> {
        let s = String::deserialize(de)?;
        let v = STANDARD.decode(s.as_bytes()).map_err(serde::de::Error::custom)?;
        v.try_into()
            .map_err(|_| serde::de::Error::custom("rng state must be 40 bytes"))
    }
}

/// Hash tag recorded as "optimizer state" for plain SGD.
pub fn sgd_state_hash() -> Digest {
    digest(b"sgd-no-optimizer-state")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub step: u64,
    pub sealed_weights: SealedBlob,
    pub weights_hash: Digest,
    /// Corpus token offsets consumed since the previous checkpoint, in
    /// training order. Empty only for checkpoint 0.
    pub data_indices: Vec<u32>,
    pub aux: AuxState,
}

impl Checkpoint {
    /// Unseal and hash-verify the weights.
    pub fn open_weights(&self, seal_key: &[u8; 32]) -> Result<Weights> {
        let payload = unseal(seal_key, &self.sealed_weights)?;
        if digest(&payload) != self.weights_hash {
            return Err(Error::SealIntegrity(format!(
                "weights hash mismatch at step {}",
                self.step
            )));
        }
        Weights::from_bytes(&payload)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofTranscript {
    pub config: ModelConfig,
    pub corpus_root: Digest,
    pub checkpoints: Vec<Checkpoint>,
}

impl ProofTranscript {
    pub fn segment_count(&self) -> usize {
        self.checkpoints.len().saturating_sub(1)
    }

    /// Hash of the whole transcript (header + checkpoint hashes + indices).
    pub fn transcript_hash(&self) -> Digest {
        let header = serde_json::to_vec(&(&self.config, &self.corpus_root)).expect("serialize");
        let mut parts: Vec<Vec<u8>> = vec![header];
        for cp in &self.checkpoints {
            let mut buf = cp.step.to_be_bytes().to_vec();
            buf.extend_from_slice(&cp.weights_hash.0);
            for ix in &cp.data_indices {
                buf.extend_from_slice(&ix.to_be_bytes());
            }
            parts.push(buf);
        }
        let refs: Vec<&[u8]> = parts.iter().map(|p| p.as_slice()).collect();
        crate::hash::digest_parts(&refs)
    }
}

/// Sealing key for transcript checkpoints. Derivable by anyone holding the
/// transcript header; confidentiality is a stand-in (see [`crate::seal`]).
pub fn transcript_seal_key(config: &ModelConfig) -> [u8; 32] {
    key_from_secret(format!("transcript-seal:{}", config.rng_seed).as_bytes())
}

/// Draw initial weights from the declared distribution uniform(−a, a).
pub fn init_weights(config: &ModelConfig) -> Weights {
    let layout = config.layout();
    let a = config.init_scale();
    let key = key_from_secret(&config.rng_seed.to_be_bytes());
    let mut stream = PrfStream::new(&key, b"init");
    let values = (0..layout.param_count())
        .map(|_| ((stream.next_f64() * 2.0 - 1.0) * a) as f32)
        .collect();
    Weights { values }
}

/// Working buffers for the update path, allocated once per run.
struct TrainBuffers {
    scratch: BatchScratch<f32>,
    grad: Vec<f32>,
    contexts: Vec<u8>,
    targets: Vec<u8>,
}

impl TrainBuffers {
    fn new(config: &ModelConfig) -> TrainBuffers {
        let layout = config.layout();
        TrainBuffers {
            scratch: BatchScratch::new(&layout, config.batch_size),
            grad: vec![0.0f32; layout.param_count()],
            contexts: Vec::with_capacity(config.batch_size * config.context_window),
            targets: Vec::with_capacity(config.batch_size),
        }
    }
}

/// The deterministic SGD update path shared by training and replay:
/// consume `positions` in fixed order, one batch per `batch_size` chunk,
/// accumulate the batch gradient in a fixed order, and apply one SGD step
/// per chunk. Single-threaded by contract.
fn run_updates(
    weights: &mut Weights,
    tokens: &[u8],
    positions: &[u32],
    config: &ModelConfig,
    buf: &mut TrainBuffers,
) {
    let layout = config.layout();
    let c = layout.context;
    let scale = config.learning_rate / config.batch_size as f32;
    for batch in positions.chunks(config.batch_size) {
        buf.contexts.clear();
        buf.targets.clear();
        for &p in batch {
            let p = p as usize;
            buf.contexts.extend_from_slice(&tokens[p..p + c]);
            buf.targets.push(tokens[p + c]);
        }
        buf.grad.fill(0.0);
        math::batch_forward_loss(&weights.values, &layout, &buf.contexts, &buf.targets, &mut buf.scratch);
        math::batch_backward(
            &weights.values,
            &mut buf.grad,
            &layout,
            &buf.contexts,
            &buf.targets,
            &mut buf.scratch,
        );
        for (w, g) in weights.values.iter_mut().zip(buf.grad.iter()) {
            *w -= scale * g;
        }
    }
}

/// Mean next-byte cross-entropy over `positions`.
pub fn mean_loss(weights: &Weights, config: &ModelConfig, tokens: &[u8], positions: &[u32]) -> f64 {
    let layout = config.layout();
    let mut scratch = Scratch::new(&layout);
    let c = layout.context;
    let mut total = 0.0f64;
    for &p in positions {
        let p = p as usize;
        math::forward(&weights.values, &layout, &tokens[p..p + c], &mut scratch);
        total += math::loss(&mut scratch, tokens[p + c]).to_f64();
    }
    total / positions.len().max(1) as f64
}

/// Train on the corpus's licensable bytes, emitting a proof transcript.
///
/// Bit-exact reproducible given (corpus, config) on one platform: seeded
/// shuffle for data order, fixed operation order in the update path, no
/// parallelism.
pub fn train(corpus: &Corpus, config: &ModelConfig) -> Result<(Weights, ProofTranscript)> {
    config.validate()?;
    let tokens = corpus.training_bytes();
    train_on_tokens(&tokens, corpus.merkle_root(), config)
}

/// Training core over a raw token stream; `corpus_root` identifies the data
/// in the transcript header.
pub fn train_on_tokens(
    tokens: &[u8],
    corpus_root: Digest,
    config: &ModelConfig,
) -> Result<(Weights, ProofTranscript)> {
    config.validate()?;
    let c = config.context_window;
    if tokens.len() < c + config.batch_size {
        return Err(Error::param(
            "corpus",
            format!(
                "needs at least context + batch = {} tokens, got {}",
                c + config.batch_size,
                tokens.len()
            ),
        ));
    }
    let n_examples = tokens.len() - c;
    let mut weights = init_weights(config);
    let mut buf = TrainBuffers::new(config);

    let key = key_from_secret(&config.rng_seed.to_be_bytes());
    let mut order = DataOrder::new(&key, n_examples);
    let seal_key = transcript_seal_key(config);

    let mut checkpoints = Vec::with_capacity((config.total_steps / config.checkpoint_interval) as usize + 1);
    checkpoints.push(make_checkpoint(0, &weights, Vec::new(), &order, config, &seal_key));

    let mut segment_positions: Vec<u32> = Vec::new();
    for step in 1..=config.total_steps {
        let batch = order.next_batch(config.batch_size);
        run_updates(&mut weights, tokens, &batch, config, &mut buf);
        segment_positions.extend_from_slice(&batch);
        if step % config.checkpoint_interval == 0 {
            checkpoints.push(make_checkpoint(
                step,
                &weights,
                std::mem::take(&mut segment_positions),
                &order,
                config,
                &seal_key,
            ));
        }
    }

    let transcript = ProofTranscript {
        config: config.clone(),
        corpus_root,
        checkpoints,
    };
    Ok((weights, transcript))
}

fn make_checkpoint(
    step: u64,
    weights: &Weights,
    data_indices: Vec<u32>,
    order: &DataOrder,
    config: &ModelConfig,
    seal_key: &[u8; 32],
) -> Checkpoint {
    let bytes = weights.to_bytes();
    let weights_hash = digest(&bytes);
    Checkpoint {
        step,
        sealed_weights: seal(seal_key, bytes),
        weights_hash,
        data_indices,
        aux: AuxState {
            rng_state: order.state(),
            learning_rate: config.learning_rate,
            optimizer_state_hash: sgd_state_hash(),
        },
    }
}

/// Epoch-shuffled position stream. Each epoch is a fresh seeded permutation
/// of all example positions; a tail shorter than one batch is dropped.
struct DataOrder {
    stream: PrfStream,
    perm: Vec<u32>,
    cursor: usize,
}

impl DataOrder {
    fn new(key: &[u8; 32], n_examples: usize) -> DataOrder {
        let mut order = DataOrder {
            stream: PrfStream::new(key, b"data-order"),
            perm: (0..n_examples as u32).collect(),
            cursor: 0,
        };
        order.reshuffle();
        order
    }

    fn reshuffle(&mut self) {
        self.stream.shuffle(&mut self.perm);
        self.cursor = 0;
    }

    fn next_batch(&mut self, batch_size: usize) -> Vec<u32> {
        if self.cursor + batch_size > self.perm.len() {
            self.reshuffle();
        }
        let batch = self.perm[self.cursor..self.cursor + batch_size].to_vec();
        self.cursor += batch_size;
        batch
    }

    fn state(&self) -> [u8; 40] {
        self.stream.state()
    }
}

/// Replay `steps` SGD steps from a checkpoint using the given data indices.
/// Pure function of its inputs; used by the verifier.
pub fn resume_segment(
    from: &Checkpoint,
    data_indices: &[u32],
    config: &ModelConfig,
    tokens: &[u8],
    steps: u64,
) -> Result<Weights> {
    let seal_key = transcript_seal_key(config);
    let mut weights = from.open_weights(&seal_key)?;
    if steps == 0 {
        return Ok(weights);
    }
    let expected = steps as usize * config.batch_size;
    if data_indices.len() != expected {
        return Err(Error::MalformedTranscript(format!(
            "segment after step {} declares {} indices, expected {}",
            from.step,
            data_indices.len(),
            expected
        )));
    }
    let max_pos = tokens.len().saturating_sub(config.context_window + 1);
    if let Some(&bad) = data_indices.iter().find(|&&p| p as usize > max_pos) {
        return Err(Error::param(
            "data_indices",
            format!("offset {bad} outside corpus bounds (max {max_pos})"),
        ));
    }
    let mut buf = TrainBuffers::new(config);
    run_updates(&mut weights, tokens, data_indices, config, &mut buf);
    Ok(weights)
}

/// Next-byte log-probabilities after `prompt` (left-padded with zero bytes
/// to the context window). The log-softmax normalization runs in f64, so the
/// exponentiated vector sums to 1 to near machine precision.
pub fn logprobs(weights: &Weights, config: &ModelConfig, prompt: &[u8]) -> Vec<f64> {
    let layout = config.layout();
    let c = layout.context;
    let mut window = vec![0u8; c];
    let take = prompt.len().min(c);
    window[c - take..].copy_from_slice(&prompt[prompt.len() - take..]);

    let mut scratch = Scratch::new(&layout);
    math::forward(&weights.values, &layout, &window, &mut scratch);
    let logits: Vec<f64> = scratch.logits.iter().map(|&z| z as f64).collect();
    let m = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = m + logits.iter().map(|z| (z - m).exp()).sum::<f64>().ln();
    logits.iter().map(|z| z - lse).collect()
}

/// An in-process queryable binding of weights + config.
#[derive(Debug, Clone)]
pub struct TinyLm {
    pub config: ModelConfig,
    pub weights: Weights,
}

impl TinyLm {
    pub fn new(config: ModelConfig, weights: Weights) -> TinyLm {
        TinyLm { config, weights }
    }
}

impl QueryableModel for TinyLm {
    fn next_logprobs(&self, prompt: &[u8]) -> Result<Vec<f64>> {
        Ok(logprobs(&self.weights, &self.config, prompt))
    }
}

/// Analytic-vs-finite-difference gradient check on a tiny config.
///
/// Draws one random (weights, batch) pair and compares the training path's
/// analytic batch gradient, instantiated in f64, against central finite
/// differences of step 1e-3. Returns the max relative coordinate error.
pub fn grad_check(config: &ModelConfig, seed: u64) -> f64 {
    let layout = config.layout();
    let key = key_from_secret(&seed.to_be_bytes());
    let mut stream = PrfStream::new(&key, b"grad-check");

    let n = layout.param_count();
    let mut weights: Vec<f64> = (0..n).map(|_| (stream.next_f64() * 2.0 - 1.0) * 0.4).collect();
    let contexts = stream.bytes(config.batch_size * layout.context);
    let targets = stream.bytes(config.batch_size);

    let mut scratch = BatchScratch::new(&layout, config.batch_size);
    let mut analytic = vec![0.0f64; n];
    math::batch_forward_loss(&weights, &layout, &contexts, &targets, &mut scratch);
    math::batch_backward(&weights, &mut analytic, &layout, &contexts, &targets, &mut scratch);

    let step = 1e-3;
    let mut max_rel = 0.0f64;
    for i in 0..n {
        let orig = weights[i];
        weights[i] = orig + step;
        let plus = math::batch_forward_loss(&weights, &layout, &contexts, &targets, &mut scratch);
        weights[i] = orig - step;
        let minus = math::batch_forward_loss(&weights, &layout, &contexts, &targets, &mut scratch);
        weights[i] = orig;
        let fd = (plus - minus) / (2.0 * step);
        let denom = analytic[i].abs().max(fd.abs()).max(1e-8);
        max_rel = max_rel.max((analytic[i] - fd).abs() / denom);
    }
    max_rel
}
