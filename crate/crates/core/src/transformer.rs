//! Decoder-only transformer over qubit configurations.
//!
//! The network is autoregressive: the sequence fed to it is a start token
//! followed by the first `n_qubits − 1` bits, and output row `i` is the
//! conditional distribution of bit `i` given bits `0..i`. Causal masking
//! zeroes attention to later positions exactly, so a forward pass over a
//! prefix reproduces the corresponding rows of a full-sequence pass
//! bit for bit — which is what lets the ancestral sampler cache
//! conditionals per prefix without changing any result.
//!
//! Blocks are pre-norm: layer norm feeds multi-head attention (no biases on
//! the query/key/value projections, a bias on the output projection), a
//! residual add, layer norm into a two-layer ReLU network widened by four,
//! and a second residual add. A final layer norm and a two-way head with
//! bias produce per-position logits; probabilities come from a softmax.

use std::collections::HashMap;

use rand_chacha::ChaCha8Rng;

use crate::autodiff::{Gradients, Tape, Tensor, Var};
use crate::error::{CoreError, Result};
use crate::mask::SymmetryMask;
use crate::pauli::Configuration;
use crate::sampling::multinomial_counts;
use crate::scalar::Scalar;

/// Standard deviation of the random weight initialization.
pub const WEIGHT_INIT_STD: f64 = 0.02;

/// Largest register enumerated exhaustively by [`enumerate_distribution`].
pub const MAX_ENUMERATED_QUBITS: usize = 12;

/// Architecture of the autoregressive model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransformerConfig {
    pub n_qubits: usize,
    pub embed_dim: usize,
    pub n_heads: usize,
    pub n_blocks: usize,
}

impl TransformerConfig {
    pub fn new(n_qubits: usize, embed_dim: usize, n_heads: usize, n_blocks: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > 64 {
            return Err(CoreError::InvalidInput(format!(
                "transformer register size {n_qubits} outside 1..=64"
            )));
        }
        if embed_dim == 0 || n_heads == 0 || n_blocks == 0 {
            return Err(CoreError::InvalidInput(
                "embedding width, head count, and block count must be positive".into(),
            ));
        }
        if embed_dim % n_heads != 0 {
            return Err(CoreError::InvalidInput(format!(
                "embedding width {embed_dim} is not divisible by {n_heads} heads"
            )));
        }
        Ok(Self {
            n_qubits,
            embed_dim,
            n_heads,
            n_blocks,
        })
    }

    pub fn head_dim(&self) -> usize {
        self.embed_dim / self.n_heads
    }

    /// Total number of trainable parameters.
    ///
    /// Token table `2×d`, positions `(n_qubits+1)×d` (the final row is
    /// allocated but never indexed), per block `12d² + 10d`, final norm
    /// `2d`, head `2d + 2`.
    pub fn param_count(&self) -> usize {
        let d = self.embed_dim;
        2 * d
            + (self.n_qubits + 1) * d
            + self.n_blocks * (12 * d * d + 10 * d)
            + 2 * d
            + (2 * d + 2)
    }
}

#[derive(Clone, Debug, PartialEq)]
struct BlockParams<T> {
    ln1_g: Tensor<T>,
    ln1_b: Tensor<T>,
    wq: Tensor<T>,
    wk: Tensor<T>,
    wv: Tensor<T>,
    wo: Tensor<T>,
    bo: Tensor<T>,
    ln2_g: Tensor<T>,
    ln2_b: Tensor<T>,
    w1: Tensor<T>,
    b1: Tensor<T>,
    w2: Tensor<T>,
    b2: Tensor<T>,
}

/// Trainable parameters of the autoregressive model.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformerParams<T> {
    config: TransformerConfig,
    tok_emb: Tensor<T>,
    pos_emb: Tensor<T>,
    blocks: Vec<BlockParams<T>>,
    lnf_g: Tensor<T>,
    lnf_b: Tensor<T>,
    head_w: Tensor<T>,
    head_b: Tensor<T>,
}

impl<T: Scalar> TransformerParams<T> {
    /// Random initialization: weight matrices and embeddings from
    /// `N(0, WEIGHT_INIT_STD²)`, biases and norm offsets zero, norm gains
    /// one. Draws happen in canonical flat order, so a fixed stream yields
    /// fixed parameters.
    pub fn init(config: &TransformerConfig, rng: &mut ChaCha8Rng) -> Self {
        let d = config.embed_dim;
        let std = T::of_f64(WEIGHT_INIT_STD);
        let mut normal =
            |rows: usize, cols: usize| Tensor::from_fn(rows, cols, |_, _| T::standard_normal(rng) * std);
        let tok_emb = normal(2, d);
        let pos_emb = normal(config.n_qubits + 1, d);
        let mut blocks = Vec::with_capacity(config.n_blocks);
        for _ in 0..config.n_blocks {
            blocks.push(BlockParams {
                ln1_g: Tensor::from_fn(1, d, |_, _| T::one()),
                ln1_b: Tensor::zeros(1, d),
                wq: normal(d, d),
                wk: normal(d, d),
                wv: normal(d, d),
                wo: normal(d, d),
                bo: Tensor::zeros(1, d),
                ln2_g: Tensor::from_fn(1, d, |_, _| T::one()),
                ln2_b: Tensor::zeros(1, d),
                w1: normal(d, 4 * d),
                b1: Tensor::zeros(1, 4 * d),
                w2: normal(4 * d, d),
                b2: Tensor::zeros(1, d),
            });
        }
        let out = Self {
            config: *config,
            tok_emb,
            pos_emb,
            blocks,
            lnf_g: Tensor::from_fn(1, d, |_, _| T::one()),
            lnf_b: Tensor::zeros(1, d),
            head_w: normal(d, 2),
            head_b: Tensor::zeros(1, 2),
        };
        debug_assert_eq!(out.flatten().len(), config.param_count());
        out
    }

    pub fn config(&self) -> &TransformerConfig {
        &self.config
    }

    fn tensors(&self) -> Vec<&Tensor<T>> {
        let mut list: Vec<&Tensor<T>> = vec![&self.tok_emb, &self.pos_emb];
        for b in &self.blocks {
            list.extend([
                &b.ln1_g, &b.ln1_b, &b.wq, &b.wk, &b.wv, &b.wo, &b.bo, &b.ln2_g, &b.ln2_b,
                &b.w1, &b.b1, &b.w2, &b.b2,
            ]);
        }
        list.extend([&self.lnf_g, &self.lnf_b, &self.head_w, &self.head_b]);
        list
    }

    fn tensors_mut(&mut self) -> Vec<&mut Tensor<T>> {
        let mut list: Vec<&mut Tensor<T>> = vec![&mut self.tok_emb, &mut self.pos_emb];
        for b in &mut self.blocks {
            list.extend([
                &mut b.ln1_g,
                &mut b.ln1_b,
                &mut b.wq,
                &mut b.wk,
                &mut b.wv,
                &mut b.wo,
                &mut b.bo,
                &mut b.ln2_g,
                &mut b.ln2_b,
                &mut b.w1,
                &mut b.b1,
                &mut b.w2,
                &mut b.b2,
            ]);
        }
        list.extend([
            &mut self.lnf_g,
            &mut self.lnf_b,
            &mut self.head_w,
            &mut self.head_b,
        ]);
        list
    }

    /// Parameters in their canonical flat order: token table, position
    /// table, per block (norm gain/offset, query, key, value, output
    /// projection and bias, second norm gain/offset, widening weight and
    /// bias, narrowing weight and bias), final norm gain/offset, head
    /// weight and bias — every matrix row-major.
    pub fn flatten(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.config.param_count());
        for t in self.tensors() {
            out.extend_from_slice(t.data());
        }
        debug_assert_eq!(out.len(), self.config.param_count());
        out
    }

    /// Overwrite all parameters from a flat slice in canonical order.
    pub fn set_from_flat(&mut self, flat: &[T]) {
        assert_eq!(flat.len(), self.config.param_count(), "flat length");
        let mut offset = 0;
        for t in self.tensors_mut() {
            let d = t.data_mut();
            d.copy_from_slice(&flat[offset..offset + d.len()]);
            offset += d.len();
        }
        debug_assert_eq!(offset, flat.len());
    }

    /// Push the parameters onto a tape as leaves, in canonical order.
    pub fn leaves(&self, tape: &mut Tape<T>) -> TransformerVars {
        let vars: Vec<Var> = self.tensors().into_iter().map(|t| tape.leaf(t.clone())).collect();
        TransformerVars {
            config: self.config,
            vars,
        }
    }
}

/// Tape handles for one forward pass, in canonical flat order.
pub struct TransformerVars {
    config: TransformerConfig,
    vars: Vec<Var>,
}

impl TransformerVars {
    fn tok_emb(&self) -> Var {
        self.vars[0]
    }

    fn pos_emb(&self) -> Var {
        self.vars[1]
    }

    fn block(&self, b: usize) -> &[Var] {
        &self.vars[2 + 13 * b..2 + 13 * (b + 1)]
    }

    fn tail(&self) -> &[Var] {
        &self.vars[2 + 13 * self.config.n_blocks..]
    }

    /// Gather gradients into canonical flat order; parameters the root
    /// never touched contribute zeros.
    pub fn flat_grad<T: Scalar>(&self, tape: &Tape<T>, grads: &Gradients<T>) -> Vec<T> {
        let mut out = Vec::with_capacity(self.config.param_count());
        for &v in &self.vars {
            match grads.get(v) {
                Some(g) => out.extend_from_slice(g.data()),
                None => out.extend(std::iter::repeat_n(T::zero(), tape.value(v).data().len())),
            }
        }
        out
    }
}

/// Token sequence for `row_count` output rows: the start token, then the
/// first `row_count − 1` bits of the configuration.
fn tokens_for(bits: u64, row_count: usize) -> Vec<usize> {
    let mut tokens = Vec::with_capacity(row_count);
    tokens.push(0);
    for k in 1..row_count {
        tokens.push(((bits >> (k - 1)) & 1) as usize);
    }
    tokens
}

/// Forward pass producing conditional distributions, shape `(tokens, 2)`:
/// row `i` is the distribution of bit `i` given bits `0..i`.
pub fn forward_graph<T: Scalar>(tape: &mut Tape<T>, vars: &TransformerVars, tokens: &[usize]) -> Var {
    let cfg = vars.config;
    let len = tokens.len();
    assert!(
        len >= 1 && len <= cfg.n_qubits,
        "sequence length {len} outside 1..={}",
        cfg.n_qubits
    );
    let positions: Vec<usize> = (0..len).collect();
    let tok = tape.lookup(vars.tok_emb(), tokens);
    let pos = tape.lookup(vars.pos_emb(), &positions);
    let mut x = tape.add(tok, pos);

    let dh = cfg.head_dim();
    let attn_scale = T::one() / T::of_usize(dh).sqrt();
    let causal: Vec<bool> = (0..len * len).map(|idx| idx % len > idx / len).collect();

    for b in 0..cfg.n_blocks {
        let [ln1_g, ln1_b, wq, wk, wv, wo, bo, ln2_g, ln2_b, w1, b1, w2, b2] =
            *<&[Var; 13]>::try_from(vars.block(b)).unwrap();
        let h = tape.layer_norm_rows(x, ln1_g, ln1_b);
        let q = tape.matmul(h, wq);
        let k = tape.matmul(h, wk);
        let v = tape.matmul(h, wv);
        let mut ctx_heads = Vec::with_capacity(cfg.n_heads);
        for head in 0..cfg.n_heads {
            let lo = head * dh;
            let hi = lo + dh;
            let qs = tape.slice_cols(q, lo, hi);
            let ks = tape.slice_cols(k, lo, hi);
            let vs = tape.slice_cols(v, lo, hi);
            let scores = tape.matmul_nt(qs, ks);
            let scaled = tape.scale(scores, attn_scale);
            let masked = tape.masked_fill(scaled, &causal, T::neg_infinity());
            let attn = tape.softmax_rows(masked);
            ctx_heads.push(tape.matmul(attn, vs));
        }
        let ctx = tape.concat_cols(&ctx_heads);
        let proj = tape.matmul(ctx, wo);
        let proj = tape.add_row(proj, bo);
        x = tape.add(x, proj);

        let h2 = tape.layer_norm_rows(x, ln2_g, ln2_b);
        let f = tape.matmul(h2, w1);
        let f = tape.add_row(f, b1);
        let f = tape.relu(f);
        let f = tape.matmul(f, w2);
        let f = tape.add_row(f, b2);
        x = tape.add(x, f);
    }

    let [lnf_g, lnf_b, head_w, head_b] = *<&[Var; 4]>::try_from(vars.tail()).unwrap();
    let xf = tape.layer_norm_rows(x, lnf_g, lnf_b);
    let logits = tape.matmul(xf, head_w);
    let logits = tape.add_row(logits, head_b);
    tape.softmax_rows(logits)
}

/// Per-position 0/1 mask rows for a configuration: entry `(i, b)` is one
/// when the symmetry mask lets bit `i` take value `b` given the earlier
/// bits. All ones for a disabled mask. The rows are constants with respect
/// to differentiation.
pub fn mask_rows<T: Scalar>(mask: &SymmetryMask, config: Configuration) -> Tensor<T> {
    Tensor::from_fn(config.n_qubits(), 2, |i, j| {
        let (zero_ok, one_ok) = mask.allowed(config.bits(), i);
        let ok = if j == 0 { zero_ok } else { one_ok };
        if ok {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// Graph for `½ ln p(s)` under the mask-renormalized autoregressive
/// distribution. Returns the scalar root; its gradient with respect to the
/// parameter leaves is the log-derivative vector of `ln √p`.
pub fn half_log_prob_graph<T: Scalar>(
    tape: &mut Tape<T>,
    vars: &TransformerVars,
    config: Configuration,
    mask: &SymmetryMask,
) -> Var {
    let n = vars.config.n_qubits;
    assert_eq!(config.n_qubits(), n, "configuration width");
    let tokens = tokens_for(config.bits(), n);
    let probs = forward_graph(tape, vars, &tokens);
    let picked_cols: Vec<usize> = (0..n).map(|i| usize::from(config.bit(i))).collect();
    let picked = tape.pick_per_row(probs, &picked_cols);
    let mask_t = tape.leaf(mask_rows(mask, config));
    let kept = tape.mul(probs, mask_t);
    let denom = tape.row_sums(kept);
    let ln_picked = tape.ln(picked);
    let ln_denom = tape.ln(denom);
    let lp = tape.sub(ln_picked, ln_denom);
    let total = tape.sum_all(lp);
    tape.scale(total, T::of_f64(0.5))
}

/// `ln p(s)` under the mask-renormalized distribution, values only.
pub fn masked_log_prob<T: Scalar>(
    params: &TransformerParams<T>,
    mask: &SymmetryMask,
    config: Configuration,
) -> T {
    let mut tape = Tape::new();
    let vars = params.leaves(&mut tape);
    let half = half_log_prob_graph(&mut tape, &vars, config, mask);
    tape.value(half).item() * T::of_f64(2.0)
}

/// Conditional distribution of bit `len` given the first `len` bits of
/// `prefix_bits`: `[p(0), p(1)]`, before any mask renormalization.
pub fn conditionals<T: Scalar>(params: &TransformerParams<T>, prefix_bits: u64, len: usize) -> [T; 2] {
    let mut tape = Tape::new();
    let vars = params.leaves(&mut tape);
    let tokens = tokens_for(prefix_bits, len + 1);
    let probs = forward_graph(&mut tape, &vars, &tokens);
    let row = tape.value(probs).row(len);
    [row[0], row[1]]
}

/// Exhaustive mask-renormalized distribution over all `2^n` configurations,
/// indexed by bit pattern. Entries outside the mask's support are exactly
/// zero. Limited to small registers; larger ones must sample ancestrally.
pub fn enumerate_distribution<T: Scalar>(
    params: &TransformerParams<T>,
    mask: &SymmetryMask,
) -> Result<Vec<f64>> {
    let n = params.config.n_qubits;
    if n > MAX_ENUMERATED_QUBITS {
        return Err(CoreError::TooManyQubits {
            what: "exhaustive enumeration of the sampling distribution",
            got: n,
            max: MAX_ENUMERATED_QUBITS,
        });
    }
    let mut out = Vec::with_capacity(1 << n);
    for bits in 0..(1u64 << n) {
        let config = Configuration::new(bits, n);
        if !mask.is_valid(config) {
            out.push(0.0);
            continue;
        }
        out.push(masked_log_prob(params, mask, config).to_f64().exp());
    }
    Ok(out)
}

/// Draw a batch from the exhaustive distribution with one multinomial.
/// Returns `(configuration, count)` pairs for patterns that were hit,
/// ascending by bit pattern.
pub fn sample_enumerated<T: Scalar>(
    params: &TransformerParams<T>,
    mask: &SymmetryMask,
    batch: u64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<(Configuration, u64)>> {
    let weights = enumerate_distribution(params, mask)?;
    let counts = multinomial_counts(&weights, batch, rng);
    let n = params.config.n_qubits;
    Ok(counts
        .into_iter()
        .enumerate()
        .filter(|&(_, c)| c > 0)
        .map(|(bits, c)| (Configuration::new(bits as u64, n), c))
        .collect())
}

/// Draw a batch bit by bit. `stream_for(b)` must yield an independent
/// generator for sample `b`; each sample consumes one uniform draw per bit.
/// Conditionals are cached per prefix, which cannot change any draw because
/// they are deterministic functions of the prefix.
pub fn sample_ancestral<T: Scalar>(
    params: &TransformerParams<T>,
    mask: &SymmetryMask,
    batch: u64,
    mut stream_for: impl FnMut(u64) -> ChaCha8Rng,
) -> Result<Vec<Configuration>> {
    let n = params.config.n_qubits;
    let mut cache: HashMap<(u64, usize), [T; 2]> = HashMap::new();
    let mut out = Vec::with_capacity(batch as usize);
    for b in 0..batch {
        let mut rng = stream_for(b);
        let mut bits = 0u64;
        for pos in 0..n {
            let prefix = bits & if pos == 0 { 0 } else { (1u64 << pos) - 1 };
            let cond = *cache
                .entry((prefix, pos))
                .or_insert_with(|| conditionals(params, prefix, pos));
            let (zero_ok, one_ok) = mask.allowed(bits, pos);
            let w0 = if zero_ok { cond[0] } else { T::zero() };
            let w1 = if one_ok { cond[1] } else { T::zero() };
            let total = w0 + w1;
            if !total.is_positive_finite() {
                return Err(CoreError::MaskedConfiguration(format!(
                    "no admissible value for bit {pos} of prefix {prefix:b}"
                )));
            }
            let u: T = T::uniform(&mut rng, T::zero(), T::one());
            if u < w1 / total {
                bits |= 1u64 << pos;
            }
        }
        out.push(Configuration::new(bits, n));
    }
    Ok(out)
}
