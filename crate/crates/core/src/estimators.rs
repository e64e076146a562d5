//! Importance-sampled energy and gradient estimators.
//!
//! Configurations are drawn from the classical network's distribution
//! `p(s)` alone; the circuit factor enters through importance weights
//! `ω(s) = |⟨s|φ⟩|² / mean|⟨s|φ⟩|²`, computed from log amplitudes with the
//! largest value shifted out before exponentiating. By construction the
//! weighted mean of `ω` is exactly one.
//!
//! With `E(s)` the local energy and `O(s)` the log-derivative vector, the
//! estimators are weighted batch means:
//!
//! ```text
//! Ê   = ⟨ω·Re E⟩
//! F_i = 2 Re[⟨ω E O_i*⟩ − ⟨ω E⟩⟨ω O_i*⟩]
//! S_ij = Re[⟨ω O_i* O_j⟩ − ⟨ω O_i*⟩⟨ω O_j⟩]        (symmetrized)
//! ```
//!
//! A batch stores one entry per distinct configuration with its frequency,
//! so duplicate samples share a single evaluation. Frequencies are
//! `count / B` for a Monte Carlo batch or exact probabilities for an
//! exhaustive one; the estimators are the same weighted sums either way.

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::pauli::{Configuration, Hamiltonian};
use crate::scalar::{cexp, Scalar};
use crate::wavefunction::{LogPsi, ORow, WavefunctionEval};

/// One distinct configuration in a batch.
pub struct BatchEntry<T> {
    pub config: Configuration,
    /// `count / B` for Monte Carlo batches, exact probability otherwise.
    pub frequency: T,
    pub log_psi: LogPsi<T>,
    pub e_loc: Complex<T>,
    pub o_row: ORow<T>,
    /// Importance weight, filled when the batch is finalized.
    pub omega: T,
}

/// A finalized batch of evaluated configurations.
pub struct SampleBatch<T> {
    entries: Vec<BatchEntry<T>>,
    /// Monte Carlo sample count behind the frequencies; `None` for an
    /// exact-expectation batch.
    mc_samples: Option<u64>,
    o_lengths: (usize, usize, usize),
}

/// Scalar summary of one batch.
#[derive(Clone, Debug)]
pub struct Estimate<T> {
    /// Energy estimate `⟨ω·Re E⟩`.
    pub energy: T,
    /// Imaginary residue `⟨ω·Im E⟩`; statistically zero for Hermitian
    /// operators and useful as a sanity signal.
    pub energy_im: T,
    /// Variance of `ω·Re E` across samples (population variance for exact
    /// batches).
    pub variance: T,
    /// `√(variance / B)`; zero for exact batches.
    pub std_error: T,
    pub max_omega: T,
    /// Weighted mean of `ω` — equals one up to rounding, by construction.
    pub mean_omega: T,
    /// Energy gradient `F` over the full flat parameter vector.
    pub grad: Vec<T>,
}

impl<T: Scalar> Estimate<T> {
    pub fn grad_inf_norm(&self) -> T {
        self.grad
            .iter()
            .fold(T::zero(), |acc, &g| if g.abs() > acc { g.abs() } else { acc })
    }
}

/// Collapse raw samples into ascending `(configuration, count)` groups.
pub fn group_samples(mut samples: Vec<Configuration>) -> Vec<(Configuration, u64)> {
    samples.sort_unstable();
    let mut groups: Vec<(Configuration, u64)> = Vec::new();
    for s in samples {
        match groups.last_mut() {
            Some((c, n)) if *c == s => *n += 1,
            _ => groups.push((s, 1)),
        }
    }
    groups
}

/// Importance weights from log weights and frequencies:
/// `ω_u = exp(w_u − max) / Σ_v freq_v · exp(w_v − max)`.
///
/// # Panics
/// If any log weight is non-finite or the frequencies are not positive.
pub fn importance_weights<T: Scalar>(weight_logs: &[T], frequencies: &[T]) -> Vec<T> {
    assert_eq!(weight_logs.len(), frequencies.len());
    assert!(!weight_logs.is_empty(), "empty batch");
    let mut max = T::neg_infinity();
    for &w in weight_logs {
        assert!(w.is_finite_scalar(), "non-finite log weight");
        if w > max {
            max = w;
        }
    }
    let raw: Vec<T> = weight_logs.iter().map(|&w| (w - max).exp()).collect();
    let mut denom = T::zero();
    for (&r, &f) in raw.iter().zip(frequencies) {
        assert!(f > T::zero(), "frequencies must be positive");
        denom += f * r;
    }
    raw.into_iter().map(|r| r / denom).collect()
}

/// Local energy `E(s) = Σ_{s'} ⟨s|H|s'⟩ ψ(s')/ψ(s)`.
///
/// The diagonal term's amplitude ratio is exactly one and skips the
/// exponential; targets outside the sampler's support have amplitude zero
/// and are dropped.
pub fn local_energy<T: Scalar, W: WavefunctionEval<T>>(
    hamiltonian: &Hamiltonian<T>,
    eval: &W,
    config: Configuration,
    log_psi: &LogPsi<T>,
) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (target, h) in hamiltonian.connected(config) {
        if target == config {
            acc += h;
            continue;
        }
        if !eval.is_valid(target) {
            continue;
        }
        let target_log = eval.eval_value(target);
        acc += h * cexp(target_log.value - log_psi.value);
    }
    acc
}

fn build_entries<T: Scalar, W: WavefunctionEval<T>>(
    hamiltonian: &Hamiltonian<T>,
    eval: &W,
    groups: &[(Configuration, T)],
) -> Result<Vec<BatchEntry<T>>> {
    let mut entries = Vec::with_capacity(groups.len());
    for pair in groups.windows(2) {
        if pair[1].0 <= pair[0].0 {
            return Err(CoreError::InvalidInput(
                "batch groups must be strictly ascending by configuration".into(),
            ));
        }
    }
    for &(config, frequency) in groups {
        // Evaluation order per configuration is fixed: network value and
        // base measurement, network gradients, connected targets in the
        // Hamiltonian's term-group order, then shifted-angle measurements.
        // Measurement stream indices depend on this order.
        let log_psi = eval.eval_value(config);
        let nets = eval.eval_net_grads(config);
        let e_loc = local_energy(hamiltonian, eval, config, &log_psi);
        if !(e_loc.re.is_finite_scalar() && e_loc.im.is_finite_scalar()) {
            return Err(CoreError::NonFinite("local energy"));
        }
        let circuit = eval.circuit_o(config);
        entries.push(BatchEntry {
            config,
            frequency,
            log_psi,
            e_loc,
            o_row: ORow {
                lnp: nets.lnp,
                gamma: nets.gamma,
                circuit,
            },
            omega: T::zero(),
        });
    }
    Ok(entries)
}

fn finalize<T: Scalar>(entries: &mut [BatchEntry<T>]) {
    let logs: Vec<T> = entries.iter().map(|e| e.log_psi.weight_log()).collect();
    let freqs: Vec<T> = entries.iter().map(|e| e.frequency).collect();
    let omegas = importance_weights(&logs, &freqs);
    for (e, w) in entries.iter_mut().zip(omegas) {
        e.omega = w;
    }
}

impl<T: Scalar> SampleBatch<T> {
    /// Build from Monte Carlo sample counts (ascending distinct
    /// configurations). Requires at least two samples so the variance
    /// estimate is defined.
    pub fn from_counts<W: WavefunctionEval<T>>(
        hamiltonian: &Hamiltonian<T>,
        eval: &W,
        groups: &[(Configuration, u64)],
    ) -> Result<Self> {
        let total: u64 = groups.iter().map(|&(_, c)| c).sum();
        if total < 2 {
            return Err(CoreError::InvalidInput(format!(
                "a Monte Carlo batch needs at least 2 samples, got {total}"
            )));
        }
        if groups.iter().any(|&(_, c)| c == 0) {
            return Err(CoreError::InvalidInput("zero-count batch group".into()));
        }
        let inv_b = T::one() / T::of_f64(total as f64);
        let weighted: Vec<(Configuration, T)> = groups
            .iter()
            .map(|&(c, n)| (c, T::of_f64(n as f64) * inv_b))
            .collect();
        let mut entries = build_entries(hamiltonian, eval, &weighted)?;
        finalize(&mut entries);
        Ok(Self {
            entries,
            mc_samples: Some(total),
            o_lengths: eval.o_lengths(),
        })
    }

    /// Build from exact probabilities (ascending distinct configurations,
    /// zero-probability entries excluded). The estimators then return
    /// exact expectations under the sampling distribution.
    pub fn from_probabilities<W: WavefunctionEval<T>>(
        hamiltonian: &Hamiltonian<T>,
        eval: &W,
        groups: &[(Configuration, T)],
    ) -> Result<Self> {
        let mut total = T::zero();
        for &(_, p) in groups {
            if !p.is_positive_finite() {
                return Err(CoreError::InvalidInput(
                    "exact batch probabilities must be positive".into(),
                ));
            }
            total += p;
        }
        if (total - T::one()).abs() > T::of_f64(1e-8) {
            return Err(CoreError::InvalidInput(format!(
                "exact batch probabilities sum to {total:?}, expected 1"
            )));
        }
        let mut entries = build_entries(hamiltonian, eval, groups)?;
        finalize(&mut entries);
        Ok(Self {
            entries,
            mc_samples: None,
            o_lengths: eval.o_lengths(),
        })
    }

    /// Assemble a batch from prebuilt entries; importance weights are
    /// recomputed. Crate-internal test support.
    #[cfg(test)]
    pub(crate) fn from_raw_parts_for_tests(
        mut entries: Vec<BatchEntry<T>>,
        mc_samples: Option<u64>,
        o_lengths: (usize, usize, usize),
    ) -> Self {
        finalize(&mut entries);
        Self {
            entries,
            mc_samples,
            o_lengths,
        }
    }

    pub fn entries(&self) -> &[BatchEntry<T>] {
        &self.entries
    }

    pub fn mc_samples(&self) -> Option<u64> {
        self.mc_samples
    }

    pub fn o_lengths(&self) -> (usize, usize, usize) {
        self.o_lengths
    }

    /// Dense parameter-space length of the log-derivative rows.
    pub fn param_len(&self) -> usize {
        self.o_lengths.0 + self.o_lengths.1 + self.o_lengths.2
    }

    /// Weighted scalar summary plus the energy gradient.
    pub fn estimate(&self) -> Estimate<T> {
        let p = self.param_len();
        let zero_c = Complex::new(T::zero(), T::zero());

        let mut energy = T::zero();
        let mut energy_im = T::zero();
        let mut max_omega = T::zero();
        let mut mean_omega = T::zero();
        let mut e_mean = zero_c;
        let mut eo_mean = vec![zero_c; p];
        let mut o_mean = vec![zero_c; p];

        let mut rows = Vec::with_capacity(self.entries.len());
        for e in &self.entries {
            let w = e.frequency * e.omega;
            energy += w * e.e_loc.re;
            energy_im += w * e.e_loc.im;
            mean_omega += e.frequency * e.omega;
            if e.omega > max_omega {
                max_omega = e.omega;
            }
            let we = Complex::new(w, T::zero()) * e.e_loc;
            e_mean += we;
            let row = e.o_row.dense(self.o_lengths);
            for i in 0..p {
                let oc = row[i].conj();
                eo_mean[i] += we * oc;
                o_mean[i] += Complex::new(w, T::zero()) * row[i];
            }
            rows.push(row);
        }

        let two = T::of_f64(2.0);
        let grad: Vec<T> = (0..p)
            .map(|i| {
                let centered = eo_mean[i] - e_mean * o_mean[i].conj();
                two * centered.re
            })
            .collect();

        // Spread of ω·Re(E) across samples.
        let mut variance = T::zero();
        for e in &self.entries {
            let x = e.omega * e.e_loc.re;
            variance += e.frequency * (x - energy) * (x - energy);
        }
        let std_error = match self.mc_samples {
            Some(b) => {
                let b_t = T::of_f64(b as f64);
                variance *= b_t / (b_t - T::one());
                (variance / b_t).sqrt()
            }
            None => T::zero(),
        };

        Estimate {
            energy,
            energy_im,
            variance,
            std_error,
            max_omega,
            mean_omega,
            grad,
        }
    }

    /// Dense covariance matrix `S` over the full flat parameter space,
    /// symmetrized. Quadratic in the parameter count — test and fallback
    /// use only.
    pub fn dense_s_matrix(&self) -> nalgebra::DMatrix<T> {
        let p = self.param_len();
        let zero_c = Complex::new(T::zero(), T::zero());
        let mut o_mean = vec![zero_c; p];
        let mut second = nalgebra::DMatrix::from_element(p, p, T::zero());
        for e in &self.entries {
            let w = e.frequency * e.omega;
            let row = e.o_row.dense(self.o_lengths);
            for i in 0..p {
                o_mean[i] += Complex::new(w, T::zero()) * row[i];
                for j in 0..p {
                    second[(i, j)] += w * (row[i].conj() * row[j]).re;
                }
            }
        }
        for i in 0..p {
            for j in 0..p {
                second[(i, j)] -= (o_mean[i].conj() * o_mean[j]).re;
            }
        }
        // Symmetrize against rounding asymmetry.
        for i in 0..p {
            for j in (i + 1)..p {
                let avg = (second[(i, j)] + second[(j, i)]) / T::of_f64(2.0);
                second[(i, j)] = avg;
                second[(j, i)] = avg;
            }
        }
        second
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use crate::pauli::build_afh_chain;
    use crate::wavefunction::TableWavefunction;
    use num_complex::Complex64;

    /// Hand-built batch with nontrivial weights, complex local energies,
    /// and complex log-derivative rows.
    fn synthetic_batch() -> SampleBatch<f64> {
        let o_lengths = (2, 1, 2);
        let counts = [3u64, 1, 2, 4];
        let total: u64 = counts.iter().sum();
        let weight_logs = [0.3, -0.2, 0.75, 0.1];
        let e_locs = [
            Complex64::new(-1.2, 0.1),
            Complex64::new(0.4, -0.3),
            Complex64::new(-2.0, 0.05),
            Complex64::new(-0.7, 0.0),
        ];
        let rows: Vec<ORow<f64>> = (0..4)
            .map(|k| ORow {
                lnp: Some(vec![0.1 * k as f64 - 0.15, 0.02 * (k * k) as f64]),
                gamma: Some(vec![0.3 - 0.12 * k as f64]),
                circuit: vec![
                    Complex64::new(0.05 * k as f64, 0.3 - 0.07 * k as f64),
                    Complex64::new(-0.2 + 0.09 * k as f64, 0.01 * k as f64),
                ],
            })
            .collect();

        let mut entries: Vec<BatchEntry<f64>> = (0..4)
            .map(|k| BatchEntry {
                config: Configuration::new(k as u64, 3),
                frequency: counts[k] as f64 / total as f64,
                log_psi: LogPsi {
                    value: Complex64::new(0.0, 0.0),
                    half_log_p: 0.0,
                    gamma: 0.0,
                    f1: weight_logs[k] / 2.0,
                    f2: 0.0,
                    amp_log: weight_logs[k] / 2.0,
                    amp_z: Vec::new(),
                    phase_z: Vec::new(),
                },
                e_loc: e_locs[k],
                o_row: ORow {
                    lnp: rows[k].lnp.clone(),
                    gamma: rows[k].gamma.clone(),
                    circuit: rows[k].circuit.clone(),
                },
                omega: 0.0,
            })
            .collect();
        finalize(&mut entries);
        SampleBatch {
            entries,
            mc_samples: Some(total),
            o_lengths,
        }
    }

    /// Reference route: expand groups into individual samples and apply
    /// the defining formulas term by term.
    #[test]
    fn grouped_estimators_match_naive_per_sample_route() {
        let batch = synthetic_batch();
        let b = batch.mc_samples().unwrap() as f64;
        let p = batch.param_len();

        // Expand into per-sample arrays.
        let mut wl = Vec::new();
        let mut es = Vec::new();
        let mut os: Vec<Vec<Complex64>> = Vec::new();
        for e in batch.entries() {
            let copies = (e.frequency * b).round() as usize;
            for _ in 0..copies {
                wl.push(e.log_psi.weight_log());
                es.push(e.e_loc);
                os.push(e.o_row.dense(batch.o_lengths()));
            }
        }
        let n = wl.len();
        assert_eq!(n as f64, b);
        let m = wl.iter().cloned().fold(f64::MIN, f64::max);
        let raw: Vec<f64> = wl.iter().map(|&w| (w - m).exp()).collect();
        let denom: f64 = raw.iter().sum::<f64>() / b;
        let omega: Vec<f64> = raw.iter().map(|&r| r / denom).collect();

        let energy: f64 = (0..n).map(|k| omega[k] * es[k].re).sum::<f64>() / b;
        let e_mean: Complex64 = (0..n).map(|k| es[k] * omega[k]).sum::<Complex64>() / b;
        let mut f = vec![0.0; p];
        for i in 0..p {
            let eo: Complex64 = (0..n)
                .map(|k| es[k] * os[k][i].conj() * omega[k])
                .sum::<Complex64>()
                / b;
            let o: Complex64 = (0..n).map(|k| os[k][i] * omega[k]).sum::<Complex64>() / b;
            f[i] = 2.0 * (eo - e_mean * o.conj()).re;
        }
        let var: f64 = (0..n)
            .map(|k| (omega[k] * es[k].re - energy).powi(2))
            .sum::<f64>()
            / (b - 1.0);

        let est = batch.estimate();
        assert!((est.energy - energy).abs() <= 1e-12);
        assert!((est.variance - var).abs() <= 1e-12);
        assert!((est.std_error - (var / b).sqrt()).abs() <= 1e-12);
        for (i, (&got, &want)) in est.grad.iter().zip(&f).enumerate() {
            assert!((got - want).abs() <= 1e-12, "gradient coordinate {i}");
        }

        // Dense covariance against the defining formula.
        let s = batch.dense_s_matrix();
        for i in 0..p {
            for j in 0..p {
                let oij: Complex64 = (0..n)
                    .map(|k| os[k][i].conj() * os[k][j] * omega[k])
                    .sum::<Complex64>()
                    / b;
                let oi: Complex64 = (0..n).map(|k| os[k][i] * omega[k]).sum::<Complex64>() / b;
                let oj: Complex64 = (0..n).map(|k| os[k][j] * omega[k]).sum::<Complex64>() / b;
                let expect = (oij - oi.conj() * oj).re;
                let sym = 0.5 * (expect + {
                    let oji: Complex64 = (0..n)
                        .map(|k| os[k][j].conj() * os[k][i] * omega[k])
                        .sum::<Complex64>()
                        / b;
                    (oji - oj.conj() * oi).re
                });
                assert!((s[(i, j)] - sym).abs() <= 1e-12, "S({i},{j})");
            }
        }
    }

    #[test]
    fn mean_weight_is_one_and_covariance_is_psd() {
        let batch = synthetic_batch();
        let est = batch.estimate();
        assert!((est.mean_omega - 1.0).abs() <= 1e-14);
        assert!(est.max_omega >= 1.0);

        let s = batch.dense_s_matrix();
        let eigs = nalgebra::SymmetricEigen::new(s).eigenvalues;
        for &e in eigs.iter() {
            assert!(e >= -1e-12, "covariance eigenvalue {e}");
        }
    }

    #[test]
    fn eigenstate_batch_is_stationary() {
        // Feed the exact ground state of the 4-site ring through the full
        // estimator pipeline: the local energy is constant, so the energy
        // is exact, the variance vanishes, and the gradient vanishes.
        let h = build_afh_chain(4, 1.0, true).unwrap();
        let dense = oracle::to_dense(&h).unwrap();
        let (e0, state) = oracle::ground_state_dense(&dense).unwrap();
        // The eigensolver leaves ~1e-16 dust on configurations outside the
        // true support; clip it so amplitude ratios stay well defined.
        let amps: Vec<Complex64> = state
            .iter()
            .map(|a| if a.norm() < 1e-12 { Complex64::new(0.0, 0.0) } else { *a })
            .collect();
        let table: TableWavefunction<f64> = TableWavefunction::from_amplitudes(4, &amps);
        let groups: Vec<(Configuration, u64)> =
            table.support().into_iter().map(|c| (c, 1)).collect();
        assert!(groups.len() > 1);
        let batch = SampleBatch::from_counts(&h, &table, &groups).unwrap();
        let est = batch.estimate();
        assert!((est.energy - e0).abs() <= 1e-10, "energy {}", est.energy);
        assert!(est.energy_im.abs() <= 1e-10);
        assert!(est.variance <= 1e-10, "variance {}", est.variance);
        assert!(est.grad_inf_norm() <= 1e-8, "gradient {}", est.grad_inf_norm());
        assert!((est.mean_omega - 1.0).abs() <= 1e-14);
    }

    #[test]
    fn importance_weights_normalize_exactly() {
        let wl = [0.2f64, -1.0, 3.5, 0.0];
        let freq = [0.25f64, 0.25, 0.25, 0.25];
        let w = importance_weights(&wl, &freq);
        let mean: f64 = w.iter().zip(&freq).map(|(&w, &f)| w * f).sum();
        assert!((mean - 1.0).abs() <= 1e-15);
        // Shift invariance: adding a constant to all logs changes nothing.
        let wl2: Vec<f64> = wl.iter().map(|&x| x + 100.0).collect();
        let w2 = importance_weights(&wl2, &freq);
        for (a, b) in w.iter().zip(&w2) {
            assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    #[should_panic(expected = "non-finite")]
    fn non_finite_log_weight_rejected() {
        importance_weights(&[0.0, f64::INFINITY], &[0.5, 0.5]);
    }

    #[test]
    fn batch_rejects_degenerate_input() {
        let h = build_afh_chain(2, 1.0, false).unwrap();
        let table: TableWavefunction<f64> = TableWavefunction::from_amplitudes(
            2,
            &[
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
                Complex64::new(0.5, 0.0),
            ],
        );
        // One sample total.
        let groups = [(Configuration::new(0, 2), 1u64)];
        assert!(SampleBatch::from_counts(&h, &table, &groups).is_err());
        // Out-of-order groups.
        let groups = [
            (Configuration::new(1, 2), 1u64),
            (Configuration::new(0, 2), 1),
        ];
        assert!(SampleBatch::from_counts(&h, &table, &groups).is_err());
        // Probabilities that do not sum to one.
        let groups = [
            (Configuration::new(0, 2), 0.4),
            (Configuration::new(1, 2), 0.4),
        ];
        assert!(SampleBatch::from_probabilities(&h, &table, &groups).is_err());
    }

    #[test]
    fn group_samples_collapses_and_sorts() {
        let samples = vec![
            Configuration::new(3, 3),
            Configuration::new(1, 3),
            Configuration::new(3, 3),
            Configuration::new(0, 3),
            Configuration::new(3, 3),
        ];
        let groups = group_samples(samples);
        assert_eq!(
            groups,
            vec![
                (Configuration::new(0, 3), 1),
                (Configuration::new(1, 3), 1),
                (Configuration::new(3, 3), 3),
            ]
        );
    }

    #[test]
    fn local_energy_diagonal_shortcut_matches_dense_row() {
        // For a diagonal-dominant configuration the local energy equals the
        // dense row contraction with exact amplitude ratios.
        let h = build_afh_chain(3, 1.0, false).unwrap();
        let amps: Vec<Complex64> = (0..8)
            .map(|i| Complex64::new(0.2 + 0.1 * i as f64, 0.05 * i as f64))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let amps: Vec<Complex64> = amps.iter().map(|a| a / norm).collect();
        let table: TableWavefunction<f64> = TableWavefunction::from_amplitudes(3, &amps);
        for bits in 0..8u64 {
            let config = Configuration::new(bits, 3);
            let lp = table.eval_value(config);
            let e = local_energy(&h, &table, config, &lp);
            let mut expect = Complex64::new(0.0, 0.0);
            for (target, hv) in h.connected(config) {
                expect += hv * amps[target.bits() as usize] / amps[bits as usize];
            }
            assert!((e - expect).norm() <= 1e-12, "config {bits:03b}");
        }
    }
}
