//! Feed-forward network producing the classical phase `γ(s)`.
//!
//! Bits enter as 0/1 reals, hidden layers are affine-plus-ReLU, and the
//! final layer is a bias-free linear map to one output. Leaving the bias
//! off the last layer removes a parameter that would only shift every
//! configuration's phase by the same constant, which the wavefunction's
//! normalization cannot see.

use rand_chacha::ChaCha8Rng;

use crate::autodiff::{Tape, Tensor, Var};
use crate::error::{CoreError, Result};
use crate::pauli::Configuration;
use crate::scalar::Scalar;

/// Standard deviation of the random weight initialization.
pub const WEIGHT_INIT_STD: f64 = 0.02;

/// Architecture of the phase network.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhaseNetConfig {
    pub n_inputs: usize,
    pub hidden: Vec<usize>,
}

impl PhaseNetConfig {
    pub fn new(n_inputs: usize, hidden: Vec<usize>) -> Result<Self> {
        if n_inputs == 0 {
            return Err(CoreError::InvalidInput(
                "phase network needs at least one input bit".into(),
            ));
        }
        if hidden.contains(&0) {
            return Err(CoreError::InvalidInput(
                "phase network hidden widths must be positive".into(),
            ));
        }
        Ok(Self { n_inputs, hidden })
    }

    /// Total number of trainable parameters: every hidden layer carries a
    /// bias, the final scalar output does not.
    pub fn param_count(&self) -> usize {
        let mut count = 0;
        let mut fan_in = self.n_inputs;
        for &width in &self.hidden {
            count += fan_in * width + width;
            fan_in = width;
        }
        count + fan_in
    }
}

/// Trainable parameters: `weights[l]` maps layer `l`'s input to its output;
/// `biases[l]` exists for hidden layers only.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseNetParams<T> {
    config: PhaseNetConfig,
    weights: Vec<Tensor<T>>,
    biases: Vec<Tensor<T>>,
}

impl<T: Scalar> PhaseNetParams<T> {
    /// Random initialization: weights from `N(0, WEIGHT_INIT_STD²)`, biases
    /// zero. Draw order is layer by layer, each weight matrix row-major,
    /// so a fixed stream yields fixed parameters.
    pub fn init(config: &PhaseNetConfig, rng: &mut ChaCha8Rng) -> Self {
        let std = T::of_f64(WEIGHT_INIT_STD);
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        let mut fan_in = config.n_inputs;
        for &width in &config.hidden {
            weights.push(Tensor::from_fn(fan_in, width, |_, _| {
                T::standard_normal(rng) * std
            }));
            biases.push(Tensor::zeros(1, width));
            fan_in = width;
        }
        weights.push(Tensor::from_fn(fan_in, 1, |_, _| {
            T::standard_normal(rng) * std
        }));
        Self {
            config: config.clone(),
            weights,
            biases,
        }
    }

    pub fn config(&self) -> &PhaseNetConfig {
        &self.config
    }

    /// Parameters in their canonical flat order: per layer, weight matrix
    /// row-major then bias (final layer has none).
    pub fn flatten(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.config.param_count());
        for l in 0..self.weights.len() {
            out.extend_from_slice(self.weights[l].data());
            if l < self.biases.len() {
                out.extend_from_slice(self.biases[l].data());
            }
        }
        debug_assert_eq!(out.len(), self.config.param_count());
        out
    }

    /// Overwrite all parameters from a flat slice in canonical order.
    pub fn set_from_flat(&mut self, flat: &[T]) {
        assert_eq!(flat.len(), self.config.param_count(), "flat length");
        let mut offset = 0;
        for l in 0..self.weights.len() {
            let w = self.weights[l].data_mut();
            w.copy_from_slice(&flat[offset..offset + w.len()]);
            offset += w.len();
            if l < self.biases.len() {
                let b = self.biases[l].data_mut();
                b.copy_from_slice(&flat[offset..offset + b.len()]);
                offset += b.len();
            }
        }
        debug_assert_eq!(offset, flat.len());
    }

    /// Push the parameters onto a tape as leaves, in canonical order.
    pub fn leaves(&self, tape: &mut Tape<T>) -> PhaseNetVars {
        let mut weights = Vec::new();
        let mut biases = Vec::new();
        for l in 0..self.weights.len() {
            weights.push(tape.leaf(self.weights[l].clone()));
            if l < self.biases.len() {
                biases.push(tape.leaf(self.biases[l].clone()));
            }
        }
        PhaseNetVars { weights, biases }
    }
}

/// Tape handles for one forward pass.
pub struct PhaseNetVars {
    pub weights: Vec<Var>,
    pub biases: Vec<Var>,
}

impl PhaseNetVars {
    /// Gather gradients into canonical flat order; `None` entries (layers
    /// the root never touched) contribute zeros.
    pub fn flat_grad<T: Scalar>(
        &self,
        tape: &Tape<T>,
        grads: &crate::autodiff::Gradients<T>,
    ) -> Vec<T> {
        let mut out = Vec::new();
        for l in 0..self.weights.len() {
            collect(tape, grads, self.weights[l], &mut out);
            if l < self.biases.len() {
                collect(tape, grads, self.biases[l], &mut out);
            }
        }
        out
    }
}

fn collect<T: Scalar>(
    tape: &Tape<T>,
    grads: &crate::autodiff::Gradients<T>,
    var: Var,
    out: &mut Vec<T>,
) {
    match grads.get(var) {
        Some(g) => out.extend_from_slice(g.data()),
        None => out.extend(std::iter::repeat_n(T::zero(), tape.value(var).data().len())),
    }
}

/// Encode configurations as an `m × n_inputs` matrix of 0/1 reals.
pub fn bits_input<T: Scalar>(configs: &[Configuration], n_inputs: usize) -> Tensor<T> {
    Tensor::from_fn(configs.len(), n_inputs, |i, j| {
        T::of_usize(usize::from(configs[i].bit(j)))
    })
}

/// Forward pass: phases for a batch of configurations, shape `m × 1`.
pub fn gamma_forward<T: Scalar>(tape: &mut Tape<T>, vars: &PhaseNetVars, input: Var) -> Var {
    let mut x = input;
    for l in 0..vars.weights.len() {
        x = tape.matmul(x, vars.weights[l]);
        if l < vars.biases.len() {
            x = tape.add_row(x, vars.biases[l]);
            x = tape.relu(x);
        }
    }
    x
}

/// Phases evaluated without gradients.
pub fn gamma_values<T: Scalar>(params: &PhaseNetParams<T>, configs: &[Configuration]) -> Vec<T> {
    let mut tape = Tape::new();
    let vars = params.leaves(&mut tape);
    let input = tape.leaf(bits_input(configs, params.config.n_inputs));
    let out = gamma_forward(&mut tape, &vars, input);
    (0..configs.len()).map(|i| tape.value(out).get(i, 0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;

    #[test]
    fn parameter_counts() {
        // 6·16+16 + 16·8+8 + 8 = 256; with 7 inputs the first layer grows
        // by 16.
        let c = PhaseNetConfig::new(6, vec![16, 8]).unwrap();
        assert_eq!(c.param_count(), 256);
        let c = PhaseNetConfig::new(7, vec![16, 8]).unwrap();
        assert_eq!(c.param_count(), 272);
        let c = PhaseNetConfig::new(4, vec![]).unwrap();
        assert_eq!(c.param_count(), 4);
    }

    #[test]
    fn flatten_round_trip() {
        let config = PhaseNetConfig::new(5, vec![7, 3]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut params: PhaseNetParams<f64> = PhaseNetParams::init(&config, &mut rng);
        let flat = params.flatten();
        assert_eq!(flat.len(), config.param_count());
        let shifted: Vec<f64> = flat.iter().map(|v| v + 1.5).collect();
        params.set_from_flat(&shifted);
        assert_eq!(params.flatten(), shifted);
    }

    #[test]
    fn final_layer_has_no_bias() {
        // With all weights zeroed the output must be exactly zero for every
        // input; a final bias would show up here.
        let config = PhaseNetConfig::new(4, vec![5]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut params: PhaseNetParams<f64> = PhaseNetParams::init(&config, &mut rng);
        let zeros = vec![0.0; config.param_count()];
        params.set_from_flat(&zeros);
        let configs: Vec<Configuration> =
            (0..16).map(|b| Configuration::new(b, 4)).collect();
        for g in gamma_values(&params, &configs) {
            assert_eq!(g, 0.0);
        }
    }

    #[test]
    fn forward_matches_hand_computation() {
        // One hidden unit, hand-set weights:
        // h = relu(0.5·b0 − 1.0·b1 + 0.25), γ = 2·h.
        let config = PhaseNetConfig::new(2, vec![1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut params: PhaseNetParams<f64> = PhaseNetParams::init(&config, &mut rng);
        params.set_from_flat(&[0.5, -1.0, 0.25, 2.0]);
        let configs: Vec<Configuration> =
            (0..4).map(|b| Configuration::new(b, 2)).collect();
        let got = gamma_values(&params, &configs);
        let expect = |b0: f64, b1: f64| 2.0 * (0.5 * b0 - 1.0 * b1 + 0.25).max(0.0);
        // Configuration bit 0 is the low bit.
        assert_eq!(got[0], expect(0.0, 0.0));
        assert_eq!(got[1], expect(1.0, 0.0));
        assert_eq!(got[2], expect(0.0, 1.0));
        assert_eq!(got[3], expect(1.0, 1.0));
    }

    #[test]
    fn gradients_cover_every_parameter() {
        // Analytic gradient of Σγ over a batch against finite differences
        // on the flat parameter vector.
        let config = PhaseNetConfig::new(3, vec![4, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut params: PhaseNetParams<f64> = PhaseNetParams::init(&config, &mut rng);
        // Spread the weights out so no ReLU sits at its kink.
        let flat: Vec<f64> = params
            .flatten()
            .iter()
            .enumerate()
            .map(|(i, _)| 0.3 + 0.11 * (i as f64 % 7.0) - 0.25 * ((i / 7) as f64 % 3.0))
            .collect();
        params.set_from_flat(&flat);
        let configs: Vec<Configuration> =
            (0..8).map(|b| Configuration::new(b, 3)).collect();

        let eval = |p: &[f64]| -> f64 {
            let mut probe = params.clone();
            probe.set_from_flat(p);
            gamma_values(&probe, &configs).iter().sum()
        };

        let mut tape = Tape::new();
        let vars = params.leaves(&mut tape);
        let input = tape.leaf(bits_input(&configs, 3));
        let out = gamma_forward(&mut tape, &vars, input);
        let root = tape.sum_all(out);
        let grads = tape.backward(root);
        let analytic = vars.flat_grad(&tape, &grads);
        assert_eq!(analytic.len(), config.param_count());

        let h = 1e-6;
        for i in 0..flat.len() {
            let mut plus = flat.clone();
            plus[i] += h;
            let mut minus = flat.clone();
            minus[i] -= h;
            let fd = (eval(&plus) - eval(&minus)) / (2.0 * h);
            assert!(
                (analytic[i] - fd).abs() / fd.abs().max(1.0) <= 1e-6,
                "param {i}: analytic {} vs fd {fd}",
                analytic[i]
            );
        }
    }

    #[test]
    fn rejects_degenerate_configs() {
        assert!(PhaseNetConfig::new(0, vec![4]).is_err());
        assert!(PhaseNetConfig::new(3, vec![4, 0]).is_err());
    }
}
