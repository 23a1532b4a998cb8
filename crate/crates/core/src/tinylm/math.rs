//! Forward/backward math for the byte MLP.
//!
//! The model is a single-hidden-layer MLP over a fixed window of byte
//! embeddings: concat(embed(b_1..b_c)) → tanh(W1·x + b1) → W2·h + b2 →
//! log-softmax over 256 next-byte logits.
//!
//! Everything is generic over the scalar so the training path runs in f32
//! (bit-exact, fixed operation order) while the gradient check instantiates
//! the identical code in f64 against central finite differences.
//!
//! The training path processes whole batches: the W2 products are tiled
//! column-wise so weight and gradient rows are streamed once per batch
//! instead of once per example. Summation order is fixed by construction —
//! lanes and tiles are compile-time constants — which is all bit-exact
//! replay requires.

pub const VOCAB: usize = 256;

/// Column-tile width for the W2 products; divides `VOCAB`.
const TILE: usize = 64;

/// Minimal float abstraction; implemented for f32 and f64 only.
pub trait Real:
    Copy
    + PartialOrd
    + std::ops::Add<Output = Self>
    + std::ops::Sub<Output = Self>
    + std::ops::Mul<Output = Self>
    + std::ops::Div<Output = Self>
    + std::ops::Neg<Output = Self>
    + std::ops::AddAssign
    + std::ops::SubAssign
{
    fn zero() -> Self;
    fn one() -> Self;
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn tanh(self) -> Self;
}

impl Real for f32 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x as f32
    }
    fn to_f64(self) -> f64 {
        self as f64
    }
    fn exp(self) -> Self {
        f32::exp(self)
    }
    fn ln(self) -> Self {
        f32::ln(self)
    }
    fn tanh(self) -> Self {
        f32::tanh(self)
    }
}

impl Real for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
}

/// Flat-vector parameter layout. Order: embedding (256×d), W1 (c·d×h),
/// b1 (h), W2 (h×256), b2 (256). All matrices row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub context: usize,
    pub embed_dim: usize,
    pub hidden_dim: usize,
}

impl Layout {
    pub fn new(context: usize, embed_dim: usize, hidden_dim: usize) -> Layout {
        Layout {
            context,
            embed_dim,
            hidden_dim,
        }
    }

    pub fn input_dim(&self) -> usize {
        self.context * self.embed_dim
    }

    pub fn embedding(&self) -> std::ops::Range<usize> {
        0..VOCAB * self.embed_dim
    }

    pub fn w1(&self) -> std::ops::Range<usize> {
        let s = self.embedding().end;
        s..s + self.input_dim() * self.hidden_dim
    }

    pub fn b1(&self) -> std::ops::Range<usize> {
        let s = self.w1().end;
        s..s + self.hidden_dim
    }

    pub fn w2(&self) -> std::ops::Range<usize> {
        let s = self.b1().end;
        s..s + self.hidden_dim * VOCAB
    }

    pub fn b2(&self) -> std::ops::Range<usize> {
        let s = self.w2().end;
        s..s + VOCAB
    }

    pub fn param_count(&self) -> usize {
        self.b2().end
    }
}

/// acc += scale * xs, elementwise.
#[inline]
fn axpy<T: Real>(acc: &mut [T], scale: T, xs: &[T]) {
    for (a, &x) in acc.iter_mut().zip(xs) {
        *a += scale * x;
    }
}

/// Dot product with eight independent accumulation lanes combined in a fixed
/// order. The lanes break the serial f32 dependency chain so the loop can
/// vectorize; the order stays fixed, which is what bit-exactness needs.
#[inline]
fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    const LANES: usize = 8;
    let mut acc = [T::zero(); LANES];
    for (ca, cb) in a.chunks_exact(LANES).zip(b.chunks_exact(LANES)) {
        for l in 0..LANES {
            acc[l] += ca[l] * cb[l];
        }
    }
    let mut total =
        ((acc[0] + acc[1]) + (acc[2] + acc[3])) + ((acc[4] + acc[5]) + (acc[6] + acc[7]));
    let n = a.len() / LANES * LANES;
    for (x, y) in a[n..].iter().zip(&b[n..]) {
        total += *x * *y;
    }
    total
}

// ---------------------------------------------------------------------------
// Per-example inference path
// ---------------------------------------------------------------------------

/// Reused buffers for single-example inference.
pub struct Scratch<T> {
    pub input: Vec<T>,
    pub hidden: Vec<T>,
    pub logits: Vec<T>,
    pub probs: Vec<T>,
}

impl<T: Real> Scratch<T> {
    pub fn new(layout: &Layout) -> Scratch<T> {
        Scratch {
            input: vec![T::zero(); layout.input_dim()],
            hidden: vec![T::zero(); layout.hidden_dim],
            logits: vec![T::zero(); VOCAB],
            probs: vec![T::zero(); VOCAB],
        }
    }
}

/// Forward pass up to logits. `context` must have exactly `layout.context`
/// bytes.
pub fn forward<T: Real>(weights: &[T], layout: &Layout, context: &[u8], s: &mut Scratch<T>) {
    debug_assert_eq!(context.len(), layout.context);
    let d = layout.embed_dim;
    let h = layout.hidden_dim;
    let emb = &weights[layout.embedding()];
    for (slot, &byte) in context.iter().enumerate() {
        let row = &emb[byte as usize * d..(byte as usize + 1) * d];
        s.input[slot * d..(slot + 1) * d].copy_from_slice(row);
    }

    let w1 = &weights[layout.w1()];
    let b1 = &weights[layout.b1()];
    s.hidden.copy_from_slice(b1);
    for (i, &x) in s.input.iter().enumerate() {
        axpy(&mut s.hidden, x, &w1[i * h..(i + 1) * h]);
    }
    for v in s.hidden.iter_mut() {
        *v = v.tanh();
    }

    let w2 = &weights[layout.w2()];
    let b2 = &weights[layout.b2()];
    s.logits.copy_from_slice(b2);
    for (j, &hv) in s.hidden.iter().enumerate() {
        axpy(&mut s.logits, hv, &w2[j * VOCAB..(j + 1) * VOCAB]);
    }
}

/// Cross-entropy of `target` given the logits in `s`; fills `probs` with the
/// softmax distribution as a side effect.
pub fn loss<T: Real>(s: &mut Scratch<T>, target: u8) -> T {
    let mut m = s.logits[0];
    for &v in &s.logits[1..] {
        if v > m {
            m = v;
        }
    }
    let mut sum = T::zero();
    for (p, &z) in s.probs.iter_mut().zip(s.logits.iter()) {
        let e = (z - m).exp();
        *p = e;
        sum += e;
    }
    let inv = T::one() / sum;
    for p in s.probs.iter_mut() {
        *p = *p * inv;
    }
    -(s.logits[target as usize] - m - sum.ln())
}

// ---------------------------------------------------------------------------
// Batched training path
// ---------------------------------------------------------------------------

/// Reused buffers for one batch. Row-major: example index is the slow axis.
pub struct BatchScratch<T> {
    batch: usize,
    pub inputs: Vec<T>,   // batch × input_dim
    pub hidden: Vec<T>,   // batch × hidden_dim, post-tanh
    pub logits: Vec<T>,   // batch × VOCAB
    pub probs: Vec<T>,    // batch × VOCAB; becomes dlogits in backward
    pub d_hidden: Vec<T>, // batch × hidden_dim
    d_input: Vec<T>,      // input_dim, per-example reuse
}

impl<T: Real> BatchScratch<T> {
    pub fn new(layout: &Layout, batch: usize) -> BatchScratch<T> {
        BatchScratch {
            batch,
            inputs: vec![T::zero(); batch * layout.input_dim()],
            hidden: vec![T::zero(); batch * layout.hidden_dim],
            logits: vec![T::zero(); batch * VOCAB],
            probs: vec![T::zero(); batch * VOCAB],
            d_hidden: vec![T::zero(); batch * layout.hidden_dim],
            d_input: vec![T::zero(); layout.input_dim()],
        }
    }
}

/// Batched forward + loss. `contexts` is `n × layout.context` bytes,
/// `targets` has `n` bytes, `n ≤ scratch.batch`. Returns the summed loss and
/// leaves softmax probabilities in `scratch.probs`.
pub fn batch_forward_loss<T: Real>(
    weights: &[T],
    layout: &Layout,
    contexts: &[u8],
    targets: &[u8],
    s: &mut BatchScratch<T>,
) -> T {
    let n = targets.len();
    debug_assert!(n <= s.batch);
    debug_assert_eq!(contexts.len(), n * layout.context);
    let d = layout.embed_dim;
    let h = layout.hidden_dim;
    let cd = layout.input_dim();

    // Embed + hidden layer, per example (W1 is small and stays cached).
    let emb = &weights[layout.embedding()];
    let w1 = &weights[layout.w1()];
    let b1 = &weights[layout.b1()];
    for e in 0..n {
        let ctx = &contexts[e * layout.context..(e + 1) * layout.context];
        let input = &mut s.inputs[e * cd..(e + 1) * cd];
        for (slot, &byte) in ctx.iter().enumerate() {
            input[slot * d..(slot + 1) * d]
                .copy_from_slice(&emb[byte as usize * d..(byte as usize + 1) * d]);
        }
        let hidden = &mut s.hidden[e * h..(e + 1) * h];
        hidden.copy_from_slice(b1);
        for (i, &x) in input.iter().enumerate() {
            axpy(hidden, x, &w1[i * h..(i + 1) * h]);
        }
        for v in hidden.iter_mut() {
            *v = v.tanh();
        }
    }

    // Logits = hidden × W2 + b2, tiled over output columns so each W2 tile
    // is read once per batch.
    let w2 = &weights[layout.w2()];
    let b2 = &weights[layout.b2()];
    for e in 0..n {
        s.logits[e * VOCAB..(e + 1) * VOCAB].copy_from_slice(b2);
    }
    for t in (0..VOCAB).step_by(TILE) {
        for e in 0..n {
            let hidden = &s.hidden[e * h..(e + 1) * h];
            let out = &mut s.logits[e * VOCAB + t..e * VOCAB + t + TILE];
            for (j, &hv) in hidden.iter().enumerate() {
                axpy(out, hv, &w2[j * VOCAB + t..j * VOCAB + t + TILE]);
            }
        }
    }

    // Softmax + loss per example.
    let mut total = T::zero();
    for (e, &target) in targets.iter().enumerate() {
        let logits = &s.logits[e * VOCAB..(e + 1) * VOCAB];
        let probs = &mut s.probs[e * VOCAB..(e + 1) * VOCAB];
        let mut m = logits[0];
        for &v in &logits[1..] {
            if v > m {
                m = v;
            }
        }
        let mut sum = T::zero();
        for (p, &z) in probs.iter_mut().zip(logits.iter()) {
            let v = (z - m).exp();
            *p = v;
            sum += v;
        }
        let inv = T::one() / sum;
        for p in probs.iter_mut() {
            *p = *p * inv;
        }
        total += -(logits[target as usize] - m - sum.ln());
    }
    total
}

/// Batched backward, accumulating dLoss/dWeights (sum over the batch) into
/// `grad`. Call right after [`batch_forward_loss`] with the same arguments.
pub fn batch_backward<T: Real>(
    weights: &[T],
    grad: &mut [T],
    layout: &Layout,
    contexts: &[u8],
    targets: &[u8],
    s: &mut BatchScratch<T>,
) {
    let n = targets.len();
    let d = layout.embed_dim;
    let h = layout.hidden_dim;
    let cd = layout.input_dim();

    // dlogits = probs − onehot, in place.
    for (e, &target) in targets.iter().enumerate() {
        s.probs[e * VOCAB + target as usize] -= T::one();
    }
    let d_logits = &s.probs;

    // b2 gradient.
    {
        let g_b2 = layout.b2();
        let g = &mut grad[g_b2];
        for e in 0..n {
            for (gv, &dl) in g.iter_mut().zip(&d_logits[e * VOCAB..(e + 1) * VOCAB]) {
                *gv += dl;
            }
        }
    }

    // dW2[j, t..t+TILE] += Σ_e hidden[e][j] · dlogits[e][t..t+TILE]
    let w2_start = layout.w2().start;
    for t in (0..VOCAB).step_by(TILE) {
        for j in 0..h {
            let g_row = &mut grad[w2_start + j * VOCAB + t..w2_start + j * VOCAB + t + TILE];
            for e in 0..n {
                let hv = s.hidden[e * h + j];
                axpy(g_row, hv, &d_logits[e * VOCAB + t..e * VOCAB + t + TILE]);
            }
        }
    }

    // d_hidden[e][j] = dot(W2[j], dlogits[e]) · tanh'
    let w2 = &weights[layout.w2()];
    for e in 0..n {
        let dl = &d_logits[e * VOCAB..(e + 1) * VOCAB];
        let hidden = &s.hidden[e * h..(e + 1) * h];
        let dh = &mut s.d_hidden[e * h..(e + 1) * h];
        for j in 0..h {
            let sum = dot(&w2[j * VOCAB..(j + 1) * VOCAB], dl);
            let hv = hidden[j];
            dh[j] = sum * (T::one() - hv * hv);
        }
    }

    // W1, b1, embedding gradients per example.
    let w1 = &weights[layout.w1()];
    let (g_w1, g_b1, g_emb) = (layout.w1(), layout.b1(), layout.embedding());
    for e in 0..n {
        let input = &s.inputs[e * cd..(e + 1) * cd];
        let dh = &s.d_hidden[e * h..(e + 1) * h];
        {
            let g = &mut grad[g_b1.clone()];
            for (gv, &dv) in g.iter_mut().zip(dh) {
                *gv += dv;
            }
        }
        for (i, &x) in input.iter().enumerate() {
            let g_row = &mut grad[g_w1.start + i * h..g_w1.start + (i + 1) * h];
            axpy(g_row, x, dh);
            s.d_input[i] = dot(&w1[i * h..(i + 1) * h], dh);
        }
        let ctx = &contexts[e * layout.context..(e + 1) * layout.context];
        for (slot, &byte) in ctx.iter().enumerate() {
            let g_row = &mut grad
                [g_emb.start + byte as usize * d..g_emb.start + (byte as usize + 1) * d];
            for (gv, &dv) in g_row.iter_mut().zip(&s.d_input[slot * d..(slot + 1) * d]) {
                *gv += dv;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_weights(layout: &Layout) -> Vec<f64> {
        // Small deterministic pseudo-random values.
        (0..layout.param_count())
            .map(|i| {
                let x = ((i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 11) as f64
                    / (1u64 << 53) as f64;
                (x - 0.5) * 0.4
            })
            .collect()
    }

    #[test]
    fn softmax_normalizes() {
        let layout = Layout::new(3, 4, 5);
        let weights = tiny_weights(&layout);
        let mut s = Scratch::new(&layout);
        forward(&weights, &layout, b"abc", &mut s);
        let l = loss(&mut s, b'q');
        assert!(l.is_finite() && l > 0.0);
        let total: f64 = s.probs.iter().sum();
        assert!((total - 1.0).abs() < 1e-12, "sum = {total}");
    }

    #[test]
    fn batch_path_matches_per_example_forward() {
        let layout = Layout::new(4, 3, 6);
        let weights = tiny_weights(&layout);
        let contexts = b"the quick brown handsaw";
        let ctx_a = &contexts[0..4];
        let ctx_b = &contexts[8..12];
        let targets = [b'x', b'y'];
        let mut flat = Vec::new();
        flat.extend_from_slice(ctx_a);
        flat.extend_from_slice(ctx_b);

        let mut bs = BatchScratch::new(&layout, 2);
        let batch_total = batch_forward_loss(&weights, &layout, &flat, &targets, &mut bs);

        let mut s = Scratch::new(&layout);
        forward(&weights, &layout, ctx_a, &mut s);
        let la = loss(&mut s, targets[0]);
        forward(&weights, &layout, ctx_b, &mut s);
        let lb = loss(&mut s, targets[1]);
        assert!((batch_total - (la + lb)).abs() < 1e-9);
    }
}
