//! The hybrid wavefunction and its log-derivative evaluation.
//!
//! A configuration's amplitude factors into four parts:
//!
//! ```text
//! ln ψ(s) = ½ ln p(s; λ₁) + i γ(s; λ₂) + A(s; θ₁, c₁) + i f₂(s; θ₂, c₂)
//! ```
//!
//! where `p` is the autoregressive network's distribution, `γ` the phase
//! network, and the circuit contributions are weighted sums of measured
//! Pauli-Z expectations, `f_k(s) = Σᵢ c_{k,i} ⟨s|U_k† Zᵢ U_k|s⟩`. The
//! amplitude term is either `A = f₁` directly or, in rescaled mode,
//! `A = a·tanh(f₁)`, which caps the importance-weight spread at `e^{4a}`.
//!
//! Parameters live in one flat vector ordered transformer, phase network,
//! amplitude-circuit rotations, amplitude-circuit weights, phase-circuit
//! rotations, phase-circuit weights. With shared rotations the phase
//! circuit reuses the amplitude circuit's angles and keeps only its own
//! weights.
//!
//! An [`Evaluator`] is built once per optimization iteration. It caches
//! every evaluated configuration so each distinct circuit variant is
//! measured exactly once per iteration, and draws measurement randomness
//! from a dedicated counter-indexed stream so a run is reproducible
//! regardless of caching.

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex;
use rand_chacha::ChaCha8Rng;

use crate::autodiff::Tape;
use crate::circuit::{measured_z_means, f_from_z, CircuitSpec, CompiledCircuit, Entanglement, MeasureMode};
use crate::error::{CoreError, Result};
use crate::mask::SymmetryMask;
use crate::pauli::Configuration;
use crate::phase_net::{self, PhaseNetConfig, PhaseNetParams};
use crate::scalar::Scalar;
use crate::seeds::{stream, StreamPurpose};
use crate::transformer::{self, TransformerConfig, TransformerParams};

/// Standard deviation for circuit rotation angles and weights at
/// initialization. Small enough that initial importance weights cluster
/// tightly around one.
pub const CIRCUIT_INIT_STD: f64 = 0.01;

// ---------------------------------------------------------------------------
// Parameter blocks
// ---------------------------------------------------------------------------

/// The four independently schedulable parameter groups.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Block {
    Transformer,
    PhaseNet,
    AmpCircuit,
    PhaseCircuit,
}

impl Block {
    pub const ALL: [Block; 4] = [
        Block::Transformer,
        Block::PhaseNet,
        Block::AmpCircuit,
        Block::PhaseCircuit,
    ];

    fn bit(self) -> u8 {
        match self {
            Block::Transformer => 1,
            Block::PhaseNet => 2,
            Block::AmpCircuit => 4,
            Block::PhaseCircuit => 8,
        }
    }

    /// Stable identifier used in checkpoints and configuration files.
    pub fn name(self) -> &'static str {
        match self {
            Block::Transformer => "transformer",
            Block::PhaseNet => "phase_net",
            Block::AmpCircuit => "amp_circuit",
            Block::PhaseCircuit => "phase_circuit",
        }
    }

    /// Inverse of [`Block::name`].
    pub fn from_name(name: &str) -> Option<Block> {
        Block::ALL.into_iter().find(|b| b.name() == name)
    }

    /// Whether the block parameterizes one of the circuits.
    pub fn needs_circuit(self) -> bool {
        matches!(self, Block::AmpCircuit | Block::PhaseCircuit)
    }
}

/// A set of active parameter blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockSet {
    bits: u8,
}

impl BlockSet {
    pub fn empty() -> Self {
        Self { bits: 0 }
    }

    pub fn all() -> Self {
        Self { bits: 0b1111 }
    }

    pub fn from_blocks(blocks: &[Block]) -> Self {
        let mut bits = 0;
        for b in blocks {
            bits |= b.bit();
        }
        Self { bits }
    }

    pub fn contains(self, block: Block) -> bool {
        self.bits & block.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.bits == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Block> {
        Block::ALL.into_iter().filter(move |b| self.contains(*b))
    }
}

// ---------------------------------------------------------------------------
// Configuration and layout
// ---------------------------------------------------------------------------

/// Circuit hyperparameters shared by the amplitude and phase circuits.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CircuitSettings {
    pub n_layers: usize,
    pub entanglement: Entanglement,
    /// Reuse the amplitude circuit's rotation angles for the phase circuit.
    pub share_theta: bool,
    /// When set, the amplitude contribution is `a·tanh(f₁)` with this `a`.
    pub tanh_rescale: Option<f64>,
}

/// Full architecture of the hybrid wavefunction.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridConfig {
    pub transformer: TransformerConfig,
    pub phase_net: PhaseNetConfig,
    pub circuit: Option<CircuitSettings>,
    pub mask: SymmetryMask,
}

impl HybridConfig {
    pub fn new(
        transformer: TransformerConfig,
        phase_net: PhaseNetConfig,
        circuit: Option<CircuitSettings>,
        mask: SymmetryMask,
    ) -> Result<Self> {
        if phase_net.n_inputs != transformer.n_qubits {
            return Err(CoreError::InvalidInput(format!(
                "phase network reads {} bits but the register has {}",
                phase_net.n_inputs, transformer.n_qubits
            )));
        }
        mask.validate_for(transformer.n_qubits)?;
        if let Some(c) = &circuit {
            if let Some(a) = c.tanh_rescale {
                if !(a.is_finite() && a > 0.0) {
                    return Err(CoreError::InvalidInput(format!(
                        "amplitude rescale must be positive, got {a}"
                    )));
                }
            }
        }
        Ok(Self {
            transformer,
            phase_net,
            circuit,
            mask,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.transformer.n_qubits
    }

    /// Circuit template both circuits instantiate.
    pub fn circuit_spec(&self) -> Option<CircuitSpec> {
        self.circuit.map(|c| CircuitSpec {
            n_qubits: self.n_qubits(),
            n_layers: c.n_layers,
            entanglement: c.entanglement,
        })
    }

    pub fn layout(&self) -> ParamLayout {
        let t = self.transformer.param_count();
        let p = self.phase_net.param_count();
        let (theta_len, coeff_len, shared) = match (&self.circuit, self.circuit_spec()) {
            (Some(c), Some(spec)) => (spec.theta_len(), spec.n_qubits, c.share_theta),
            _ => (0, 0, false),
        };
        let amp_theta = t + p..t + p + theta_len;
        let amp_coeff = amp_theta.end..amp_theta.end + coeff_len;
        let phase_theta_len = if shared { 0 } else { theta_len };
        let phase_theta = amp_coeff.end..amp_coeff.end + phase_theta_len;
        let phase_coeff = phase_theta.end..phase_theta.end + coeff_len;
        ParamLayout {
            transformer: 0..t,
            phase_net: t..t + p,
            amp_theta,
            amp_coeff,
            phase_theta,
            phase_coeff,
        }
    }

    pub fn param_count(&self) -> usize {
        self.layout().total()
    }
}

/// Positions of each block inside the flat parameter vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamLayout {
    pub transformer: std::ops::Range<usize>,
    pub phase_net: std::ops::Range<usize>,
    pub amp_theta: std::ops::Range<usize>,
    pub amp_coeff: std::ops::Range<usize>,
    pub phase_theta: std::ops::Range<usize>,
    pub phase_coeff: std::ops::Range<usize>,
}

impl ParamLayout {
    pub fn total(&self) -> usize {
        self.phase_coeff.end
    }

    /// Start of the circuit section.
    pub fn circuit_start(&self) -> usize {
        self.amp_theta.start
    }

    /// Length of the circuit section.
    pub fn circuit_len(&self) -> usize {
        self.phase_coeff.end - self.amp_theta.start
    }

    /// Contiguous coordinate range a block occupies. The amplitude block is
    /// its rotations plus weights; with shared rotations the phase block is
    /// just its weights.
    pub fn block_range(&self, block: Block) -> std::ops::Range<usize> {
        match block {
            Block::Transformer => self.transformer.clone(),
            Block::PhaseNet => self.phase_net.clone(),
            Block::AmpCircuit => self.amp_theta.start..self.amp_coeff.end,
            Block::PhaseCircuit => self.phase_theta.start..self.phase_coeff.end,
        }
    }

    /// Order-sensitive fingerprint of the layout, stored in checkpoints to
    /// reject parameter vectors from a different architecture.
    pub fn checksum(&self) -> u64 {
        let mut h = 0x9e37_79b9_7f4a_7c15u64;
        for r in [
            &self.transformer,
            &self.phase_net,
            &self.amp_theta,
            &self.amp_coeff,
            &self.phase_theta,
            &self.phase_coeff,
        ] {
            h = mix(h, r.start as u64);
            h = mix(h, r.end as u64);
        }
        h
    }
}

fn mix(state: u64, value: u64) -> u64 {
    let mut z = state ^ value.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// All trainable parameters of the hybrid wavefunction.
#[derive(Clone, Debug, PartialEq)]
pub struct HybridParams<T> {
    pub transformer: TransformerParams<T>,
    pub phase_net: PhaseNetParams<T>,
    pub amp_theta: Vec<T>,
    pub amp_coeff: Vec<T>,
    pub phase_theta: Vec<T>,
    pub phase_coeff: Vec<T>,
}

impl<T: Scalar> HybridParams<T> {
    /// Random initialization. Draws happen in flat-layout order so a fixed
    /// stream yields fixed parameters: networks first, then circuit angles
    /// and weights from `N(0, CIRCUIT_INIT_STD²)`.
    pub fn init(config: &HybridConfig, rng: &mut ChaCha8Rng) -> Self {
        let transformer = TransformerParams::init(&config.transformer, rng);
        let phase_net = PhaseNetParams::init(&config.phase_net, rng);
        let layout = config.layout();
        let std = T::of_f64(CIRCUIT_INIT_STD);
        let mut draw = |len: usize| -> Vec<T> {
            (0..len).map(|_| T::standard_normal(rng) * std).collect()
        };
        Self {
            transformer,
            phase_net,
            amp_theta: draw(layout.amp_theta.len()),
            amp_coeff: draw(layout.amp_coeff.len()),
            phase_theta: draw(layout.phase_theta.len()),
            phase_coeff: draw(layout.phase_coeff.len()),
        }
    }

    /// Parameters in flat-layout order.
    pub fn flatten(&self) -> Vec<T> {
        let mut out = self.transformer.flatten();
        out.extend(self.phase_net.flatten());
        out.extend_from_slice(&self.amp_theta);
        out.extend_from_slice(&self.amp_coeff);
        out.extend_from_slice(&self.phase_theta);
        out.extend_from_slice(&self.phase_coeff);
        out
    }

    /// Overwrite all parameters from a flat vector in layout order.
    pub fn set_from_flat(&mut self, flat: &[T]) {
        let t = self.transformer.config().param_count();
        let p = self.phase_net.config().param_count();
        self.transformer.set_from_flat(&flat[..t]);
        self.phase_net.set_from_flat(&flat[t..t + p]);
        let mut offset = t + p;
        for part in [
            &mut self.amp_theta,
            &mut self.amp_coeff,
            &mut self.phase_theta,
            &mut self.phase_coeff,
        ] {
            let len = part.len();
            part.copy_from_slice(&flat[offset..offset + len]);
            offset += len;
        }
        assert_eq!(offset, flat.len(), "flat parameter length");
    }

    /// In-place update `W ← W + scale · delta` over the full flat vector.
    pub fn axpy(&mut self, scale: T, delta: &[T]) {
        let mut flat = self.flatten();
        assert_eq!(delta.len(), flat.len(), "update length");
        for (w, &d) in flat.iter_mut().zip(delta) {
            *w += scale * d;
        }
        self.set_from_flat(&flat);
    }
}

// ---------------------------------------------------------------------------
// Evaluation results
// ---------------------------------------------------------------------------

/// Everything known about one configuration's amplitude after evaluation.
#[derive(Clone, Debug)]
pub struct LogPsi<T> {
    /// `ln ψ(s)`.
    pub value: Complex<T>,
    /// `½ ln p(s)` from the autoregressive network.
    pub half_log_p: T,
    /// Phase-network output.
    pub gamma: T,
    /// Raw amplitude-circuit sum `f₁` (before any rescale).
    pub f1: T,
    /// Phase-circuit sum `f₂`.
    pub f2: T,
    /// Amplitude contribution actually used: `f₁` or `a·tanh(f₁)`.
    pub amp_log: T,
    /// Measured `⟨Zᵢ⟩` for the amplitude circuit at base angles.
    pub amp_z: Vec<T>,
    /// Measured `⟨Zᵢ⟩` for the phase circuit at base angles (equal to
    /// `amp_z` when rotations are shared).
    pub phase_z: Vec<T>,
}

impl<T: Scalar> LogPsi<T> {
    /// Log of the unnormalized importance weight: `ln |⟨s|φ⟩|² = 2A(s)`.
    /// Zero without a circuit, so weights degenerate to one.
    pub fn weight_log(&self) -> T {
        self.amp_log * T::of_f64(2.0)
    }
}

/// Network log-derivatives for one sampled configuration; `None` for
/// blocks that are not being optimized.
#[derive(Clone, Debug)]
pub struct NetGrads<T> {
    /// `∂ ln √p(s)` over transformer parameters (real).
    pub lnp: Option<Vec<T>>,
    /// `∂ γ(s)` over phase-network parameters (the log-derivative is `i`
    /// times this).
    pub gamma: Option<Vec<T>>,
}

/// Complete log-derivative row for one configuration, split by structure:
/// the network parts stay factored (the reduced natural-gradient solve
/// exploits that), the circuit part is dense complex in layout order.
#[derive(Clone, Debug)]
pub struct ORow<T> {
    pub lnp: Option<Vec<T>>,
    pub gamma: Option<Vec<T>>,
    /// Entries for the whole circuit section (layout order); zeros where a
    /// block is inactive. Empty when the model has no circuit.
    pub circuit: Vec<Complex<T>>,
}

impl<T: Scalar> ORow<T> {
    /// Assemble the dense complex log-derivative vector in layout order.
    pub fn dense(&self, lengths: (usize, usize, usize)) -> Vec<Complex<T>> {
        let (t, p, c) = lengths;
        let mut out = Vec::with_capacity(t + p + c);
        match &self.lnp {
            Some(v) => {
                debug_assert_eq!(v.len(), t);
                out.extend(v.iter().map(|&x| Complex::new(x, T::zero())));
            }
            None => out.extend(std::iter::repeat_n(Complex::new(T::zero(), T::zero()), t)),
        }
        match &self.gamma {
            Some(v) => {
                debug_assert_eq!(v.len(), p);
                out.extend(v.iter().map(|&x| Complex::new(T::zero(), x)));
            }
            None => out.extend(std::iter::repeat_n(Complex::new(T::zero(), T::zero()), p)),
        }
        debug_assert!(self.circuit.len() == c || self.circuit.is_empty());
        out.extend_from_slice(&self.circuit);
        out.resize(t + p + c, Complex::new(T::zero(), T::zero()));
        out
    }
}

/// Wavefunction interface the estimators run against. Implementations must
/// be deterministic within one iteration: repeated calls for the same
/// configuration return identical values.
pub trait WavefunctionEval<T: Scalar> {
    fn n_qubits(&self) -> usize;

    /// Whether the configuration lies inside the sampler's support. Local
    /// energy terms whose target fails this are dropped (their amplitude
    /// is exactly zero).
    fn is_valid(&self, config: Configuration) -> bool;

    /// Amplitude evaluation, cached per configuration. Must only be called
    /// with valid configurations.
    fn eval_value(&self, config: Configuration) -> LogPsi<T>;

    /// Network gradients for a sampled configuration (no randomness).
    fn eval_net_grads(&self, config: Configuration) -> NetGrads<T>;

    /// Circuit log-derivative entries in layout order, using measurements
    /// from [`Self::eval_value`] plus shifted-angle variants. Must be
    /// called after `eval_value` for the same configuration.
    fn circuit_o(&self, config: Configuration) -> Vec<Complex<T>>;

    /// Dense lengths of the three log-derivative sections
    /// (transformer, phase network, circuit).
    fn o_lengths(&self) -> (usize, usize, usize);
}

// ---------------------------------------------------------------------------
// Evaluator
// ---------------------------------------------------------------------------

struct EvalState<T> {
    measure_counter: u64,
    values: HashMap<u64, LogPsi<T>>,
}

/// Per-iteration evaluator of the hybrid wavefunction.
///
/// Measurement randomness: every measurement event (a base or shifted
/// circuit evaluation of one configuration) consumes the next
/// counter-indexed stream for this iteration, in the deterministic order
/// the estimator walks configurations. Caching therefore never changes a
/// result, only avoids repeating it.
pub struct Evaluator<'a, T: Scalar> {
    config: &'a HybridConfig,
    params: &'a HybridParams<T>,
    active: BlockSet,
    mode: MeasureMode,
    master_seed: u64,
    iter: u64,
    compiled: Option<CompiledCircuit>,
    state: RefCell<EvalState<T>>,
}

impl<'a, T: Scalar> Evaluator<'a, T> {
    pub fn new(
        config: &'a HybridConfig,
        params: &'a HybridParams<T>,
        active: BlockSet,
        mode: MeasureMode,
        master_seed: u64,
        iter: u64,
    ) -> Result<Self> {
        mode.validate()?;
        let compiled = match config.circuit_spec() {
            Some(spec) => Some(spec.compile()?),
            None => None,
        };
        Ok(Self {
            config,
            params,
            active,
            mode,
            master_seed,
            iter,
            compiled,
            state: RefCell::new(EvalState {
                measure_counter: 0,
                values: HashMap::new(),
            }),
        })
    }

    pub fn active(&self) -> BlockSet {
        self.active
    }

    fn next_measure_rng(&self) -> ChaCha8Rng {
        let mut st = self.state.borrow_mut();
        let idx = st.measure_counter;
        st.measure_counter += 1;
        stream(self.master_seed, StreamPurpose::Measure, self.iter, idx)
    }

    /// `⟨Zᵢ⟩` of one circuit variant, one fresh measurement event.
    fn measure(&self, circuit: &CompiledCircuit, theta: &[T], config: Configuration) -> Vec<T> {
        let state = circuit.simulate(theta, config);
        let mut rng = self.next_measure_rng();
        measured_z_means(&state, self.mode, &mut rng)
    }

    fn amp_chain(&self, f1: T) -> T {
        match self.config.circuit.and_then(|c| c.tanh_rescale) {
            Some(a) => {
                let a = T::of_f64(a);
                a * (T::one() - f1.tanh() * f1.tanh())
            }
            None => T::one(),
        }
    }

    fn compute_value(&self, config: Configuration) -> LogPsi<T> {
        let half_log_p = transformer::masked_log_prob(&self.params.transformer, &self.config.mask, config)
            * T::of_f64(0.5);
        let gamma = phase_net::gamma_values(&self.params.phase_net, &[config])[0];

        let (f1, f2, amp_z, phase_z) = match (&self.compiled, &self.config.circuit) {
            (Some(circuit), Some(settings)) => {
                let amp_z = self.measure(circuit, &self.params.amp_theta, config);
                let f1 = f_from_z(&self.params.amp_coeff, &amp_z);
                let (f2, phase_z) = if settings.share_theta {
                    (f_from_z(&self.params.phase_coeff, &amp_z), amp_z.clone())
                } else {
                    let phase_z = self.measure(circuit, &self.params.phase_theta, config);
                    (f_from_z(&self.params.phase_coeff, &phase_z), phase_z)
                };
                (f1, f2, amp_z, phase_z)
            }
            _ => (T::zero(), T::zero(), Vec::new(), Vec::new()),
        };

        let amp_log = match self.config.circuit.and_then(|c| c.tanh_rescale) {
            Some(a) if self.compiled.is_some() => T::of_f64(a) * f1.tanh(),
            _ => f1,
        };

        LogPsi {
            value: Complex::new(half_log_p + amp_log, gamma + f2),
            half_log_p,
            gamma,
            f1,
            f2,
            amp_log,
            amp_z,
            phase_z,
        }
    }
}

impl<'a, T: Scalar> WavefunctionEval<T> for Evaluator<'a, T> {
    fn n_qubits(&self) -> usize {
        self.config.n_qubits()
    }

    fn is_valid(&self, config: Configuration) -> bool {
        self.config.mask.is_valid(config)
    }

    fn eval_value(&self, config: Configuration) -> LogPsi<T> {
        debug_assert!(self.is_valid(config), "evaluating a masked configuration");
        if let Some(cached) = self.state.borrow().values.get(&config.bits()) {
            return cached.clone();
        }
        let value = self.compute_value(config);
        self.state
            .borrow_mut()
            .values
            .insert(config.bits(), value.clone());
        value
    }

    fn eval_net_grads(&self, config: Configuration) -> NetGrads<T> {
        let lnp = if self.active.contains(Block::Transformer) {
            let mut tape = Tape::new();
            let vars = self.params.transformer.leaves(&mut tape);
            let half = transformer::half_log_prob_graph(&mut tape, &vars, config, &self.config.mask);
            let grads = tape.backward(half);
            Some(vars.flat_grad(&tape, &grads))
        } else {
            None
        };
        let gamma = if self.active.contains(Block::PhaseNet) {
            let mut tape = Tape::new();
            let vars = self.params.phase_net.leaves(&mut tape);
            let input = tape.leaf(phase_net::bits_input(&[config], self.n_qubits()));
            let out = phase_net::gamma_forward(&mut tape, &vars, input);
            let root = tape.sum_all(out);
            let grads = tape.backward(root);
            Some(vars.flat_grad(&tape, &grads))
        } else {
            None
        };
        NetGrads { lnp, gamma }
    }

    fn circuit_o(&self, config: Configuration) -> Vec<Complex<T>> {
        let (Some(circuit), Some(settings)) = (&self.compiled, &self.config.circuit) else {
            return Vec::new();
        };
        let layout = self.config.layout();
        let start = layout.circuit_start();
        let mut out = vec![Complex::new(T::zero(), T::zero()); layout.circuit_len()];

        let base = {
            let st = self.state.borrow();
            st.values
                .get(&config.bits())
                .expect("circuit_o requires a prior eval_value for the configuration")
                .clone()
        };
        let chain = self.amp_chain(base.f1);
        let zero = T::zero();
        let half = T::of_f64(0.5);
        let shift = T::of_f64(std::f64::consts::FRAC_PI_2);

        let amp_active = self.active.contains(Block::AmpCircuit);
        let phase_active = self.active.contains(Block::PhaseCircuit);

        // Rotation-angle derivatives via the ±π/2 shift rule, each shifted
        // variant measured once. With shared rotations a single sweep
        // yields both ∂f₁ and ∂f₂ from the same measurements.
        if amp_active {
            for j in 0..self.params.amp_theta.len() {
                let mut theta = self.params.amp_theta.clone();
                theta[j] += shift;
                let z_plus = self.measure(circuit, &theta, config);
                theta[j] = self.params.amp_theta[j] - shift;
                let z_minus = self.measure(circuit, &theta, config);
                let df1 = (f_from_z(&self.params.amp_coeff, &z_plus)
                    - f_from_z(&self.params.amp_coeff, &z_minus))
                    * half;
                let im = if settings.share_theta {
                    (f_from_z(&self.params.phase_coeff, &z_plus)
                        - f_from_z(&self.params.phase_coeff, &z_minus))
                        * half
                } else {
                    zero
                };
                out[layout.amp_theta.start - start + j] = Complex::new(chain * df1, im);
            }
            for (i, &z) in base.amp_z.iter().enumerate() {
                out[layout.amp_coeff.start - start + i] = Complex::new(chain * z, zero);
            }
        }
        if phase_active {
            if !settings.share_theta {
                for j in 0..self.params.phase_theta.len() {
                    let mut theta = self.params.phase_theta.clone();
                    theta[j] += shift;
                    let z_plus = self.measure(circuit, &theta, config);
                    theta[j] = self.params.phase_theta[j] - shift;
                    let z_minus = self.measure(circuit, &theta, config);
                    let df2 = (f_from_z(&self.params.phase_coeff, &z_plus)
                        - f_from_z(&self.params.phase_coeff, &z_minus))
                        * half;
                    out[layout.phase_theta.start - start + j] = Complex::new(zero, df2);
                }
            }
            for (i, &z) in base.phase_z.iter().enumerate() {
                out[layout.phase_coeff.start - start + i] = Complex::new(zero, z);
            }
        }
        out
    }

    fn o_lengths(&self) -> (usize, usize, usize) {
        let layout = self.config.layout();
        (
            layout.transformer.len(),
            layout.phase_net.len(),
            layout.circuit_len(),
        )
    }
}

// ---------------------------------------------------------------------------
// Table-backed wavefunction (test fixture)
// ---------------------------------------------------------------------------

/// A wavefunction read from an explicit amplitude table, used to feed known
/// states (e.g. exact eigenstates) through the estimator pipeline. Its
/// log-derivatives are an arbitrary fixed pattern: at an eigenstate the
/// local energy is constant, so gradient estimates must vanish no matter
/// what the log-derivatives are.
pub struct TableWavefunction<T> {
    n_qubits: usize,
    log_amps: Vec<Complex<T>>,
}

impl<T: Scalar> TableWavefunction<T> {
    /// Build from basis amplitudes (index = bit pattern). Zero amplitudes
    /// get log-amplitude `−∞`, which downstream ratios turn into exact
    /// zeros.
    pub fn from_amplitudes(n_qubits: usize, amps: &[Complex<f64>]) -> Self {
        assert_eq!(amps.len(), 1 << n_qubits, "amplitude table size");
        let log_amps = amps
            .iter()
            .map(|a| {
                let r = a.norm();
                if r == 0.0 {
                    Complex::new(T::neg_infinity(), T::zero())
                } else {
                    Complex::new(T::of_f64(r.ln()), T::of_f64(a.arg()))
                }
            })
            .collect();
        Self { n_qubits, log_amps }
    }

    /// Bit patterns with nonzero amplitude.
    pub fn support(&self) -> Vec<Configuration> {
        (0..self.log_amps.len())
            .filter(|&i| self.log_amps[i].re > T::neg_infinity())
            .map(|i| Configuration::new(i as u64, self.n_qubits))
            .collect()
    }
}

impl<T: Scalar> WavefunctionEval<T> for TableWavefunction<T> {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn is_valid(&self, _config: Configuration) -> bool {
        true
    }

    fn eval_value(&self, config: Configuration) -> LogPsi<T> {
        let value = self.log_amps[config.bits() as usize];
        LogPsi {
            value,
            half_log_p: value.re,
            gamma: value.im,
            f1: T::zero(),
            f2: T::zero(),
            amp_log: T::zero(),
            amp_z: Vec::new(),
            phase_z: Vec::new(),
        }
    }

    fn eval_net_grads(&self, config: Configuration) -> NetGrads<T> {
        let lnp = (0..self.n_qubits)
            .map(|i| T::of_usize(usize::from(config.bit(i))) - T::of_f64(0.5))
            .collect();
        let gamma = (0..self.n_qubits)
            .map(|i| {
                let sign = if config.bit(i) == 1 { 1.0 } else { -1.0 };
                T::of_f64(sign * 0.25 * (i + 1) as f64)
            })
            .collect();
        NetGrads {
            lnp: Some(lnp),
            gamma: Some(gamma),
        }
    }

    fn circuit_o(&self, _config: Configuration) -> Vec<Complex<T>> {
        Vec::new()
    }

    fn o_lengths(&self) -> (usize, usize, usize) {
        (self.n_qubits, self.n_qubits, 0)
    }
}
