//! End-to-end consistency of the sampled estimators against dense linear
//! algebra: with exhaustive enumeration and exact circuit measurement, the
//! batch energy must equal the Rayleigh quotient of the assembled state,
//! and the gradient estimator must equal finite differences of that exact
//! energy functional.

use hvmc_core::circuit::{Entanglement, MeasureMode};
use hvmc_core::estimators::SampleBatch;
use hvmc_core::mask::SymmetryMask;
use hvmc_core::oracle;
use hvmc_core::pauli::{build_afh_chain, Configuration, Hamiltonian};
use hvmc_core::phase_net::PhaseNetConfig;
use hvmc_core::seeds::{stream, StreamPurpose};
use hvmc_core::transformer::{self, TransformerConfig};
use hvmc_core::wavefunction::{
    BlockSet, CircuitSettings, Evaluator, HybridConfig, HybridParams, WavefunctionEval,
};
use nalgebra::DVector;
use num_complex::Complex64;

const SEED: u64 = 7;

fn plain_model() -> HybridConfig {
    HybridConfig::new(
        TransformerConfig::new(3, 4, 2, 1).unwrap(),
        PhaseNetConfig::new(3, vec![8]).unwrap(),
        Some(CircuitSettings {
            n_layers: 1,
            entanglement: Entanglement::Linear,
            share_theta: false,
            tanh_rescale: None,
        }),
        SymmetryMask::disabled(),
    )
    .unwrap()
}

fn masked_shared_model() -> HybridConfig {
    HybridConfig::new(
        TransformerConfig::new(4, 4, 2, 1).unwrap(),
        PhaseNetConfig::new(4, vec![8]).unwrap(),
        Some(CircuitSettings {
            n_layers: 2,
            entanglement: Entanglement::Full,
            share_theta: true,
            tanh_rescale: Some(0.8),
        }),
        SymmetryMask::particle_number(2, 1, 1).unwrap(),
    )
    .unwrap()
}

/// Deterministic parameters pushed away from the near-uniform init so the
/// distribution, phases, and circuit factors are all nontrivial.
fn spread_params(config: &HybridConfig) -> HybridParams<f64> {
    let mut rng = stream(SEED, StreamPurpose::Init, 0, 0);
    let mut params = HybridParams::init(config, &mut rng);
    let mut flat = params.flatten();
    for (i, v) in flat.iter_mut().enumerate() {
        *v += 0.2 * ((i % 11) as f64 - 5.0) / 5.0;
    }
    params.set_from_flat(&flat);
    params
}

/// Assemble the state vector from per-configuration log amplitudes and take
/// the exact Rayleigh quotient — no estimator code involved.
fn exact_energy(config: &HybridConfig, params: &HybridParams<f64>, h: &Hamiltonian<f64>) -> f64 {
    let eval = Evaluator::new(
        config,
        params,
        BlockSet::all(),
        MeasureMode::Exact,
        SEED,
        0,
    )
    .unwrap();
    let n = config.n_qubits();
    let mut v = DVector::from_element(1 << n, Complex64::new(0.0, 0.0));
    for bits in 0..(1u64 << n) {
        let c = Configuration::new(bits, n);
        if !eval.is_valid(c) {
            continue;
        }
        v[bits as usize] = eval.eval_value(c).value.exp();
    }
    let dense = oracle::to_dense(h).unwrap();
    oracle::rayleigh_quotient(&dense, &v)
}

fn enumeration_batch<'a>(
    config: &HybridConfig,
    eval: &'a Evaluator<'a, f64>,
    params: &HybridParams<f64>,
    h: &Hamiltonian<f64>,
) -> SampleBatch<f64> {
    let dist = transformer::enumerate_distribution(&params.transformer, &config.mask).unwrap();
    let n = config.n_qubits();
    let groups: Vec<(Configuration, f64)> = dist
        .iter()
        .enumerate()
        .filter(|&(_, &p)| p > 0.0)
        .map(|(bits, &p)| (Configuration::new(bits as u64, n), p))
        .collect();
    SampleBatch::from_probabilities(h, eval, &groups).unwrap()
}

#[test]
fn enumeration_energy_equals_rayleigh_quotient() {
    for (config, h) in [
        (plain_model(), build_afh_chain(3, 1.0, false).unwrap()),
        (masked_shared_model(), build_afh_chain(4, 1.0, true).unwrap()),
    ] {
        let params = spread_params(&config);
        let eval = Evaluator::new(
            &config,
            &params,
            BlockSet::all(),
            MeasureMode::Exact,
            SEED,
            0,
        )
        .unwrap();
        let batch = enumeration_batch(&config, &eval, &params, &h);
        let est = batch.estimate();
        let exact = exact_energy(&config, &params, &h);
        assert!(
            (est.energy - exact).abs() <= 1e-8,
            "energy {} vs rayleigh {}",
            est.energy,
            exact
        );
        assert!(est.energy_im.abs() <= 1e-8, "imag residue {}", est.energy_im);
        assert!((est.mean_omega - 1.0).abs() <= 1e-10);
        assert_eq!(est.std_error, 0.0);
    }
}

#[test]
fn enumeration_gradient_equals_energy_finite_differences() {
    for (config, h) in [
        (plain_model(), build_afh_chain(3, 1.0, false).unwrap()),
        (masked_shared_model(), build_afh_chain(4, 1.0, true).unwrap()),
    ] {
        let params = spread_params(&config);
        let eval = Evaluator::new(
            &config,
            &params,
            BlockSet::all(),
            MeasureMode::Exact,
            SEED,
            0,
        )
        .unwrap();
        let batch = enumeration_batch(&config, &eval, &params, &h);
        let grad = batch.estimate().grad;
        assert_eq!(grad.len(), config.param_count());

        let base = params.flatten();
        let step = 1e-5;
        for i in 0..base.len() {
            let probe = |delta: f64| -> f64 {
                let mut flat = base.clone();
                flat[i] += delta;
                let mut p = spread_params(&config);
                p.set_from_flat(&flat);
                exact_energy(&config, &p, &h)
            };
            let fd = (probe(step) - probe(-step)) / (2.0 * step);
            let tol = 1e-6 * fd.abs().max(1.0);
            assert!(
                (grad[i] - fd).abs() <= tol,
                "coordinate {i}: estimator {} vs finite difference {fd}",
                grad[i]
            );
        }
    }
}

#[test]
fn monte_carlo_estimate_agrees_within_error_bars() {
    let config = plain_model();
    let h = build_afh_chain(3, 1.0, false).unwrap();
    let params = spread_params(&config);
    let exact = exact_energy(&config, &params, &h);

    let eval = Evaluator::new(
        &config,
        &params,
        BlockSet::all(),
        MeasureMode::Exact,
        SEED,
        0,
    )
    .unwrap();
    let mut rng = stream(SEED, StreamPurpose::Sample, 0, 0);
    let groups =
        transformer::sample_enumerated(&params.transformer, &config.mask, 2000, &mut rng).unwrap();
    let batch = SampleBatch::from_counts(&h, &eval, &groups).unwrap();
    let est = batch.estimate();
    assert!(est.std_error > 0.0);
    assert!(
        (est.energy - exact).abs() <= 5.0 * est.std_error,
        "sampled {} vs exact {exact} with error bar {}",
        est.energy,
        est.std_error
    );
    assert!((est.mean_omega - 1.0).abs() <= 1e-10);
    assert!(est.max_omega.is_finite());
}
