//! Parameter-update rules: cosine learning-rate decay, per-block Adam, and
//! stochastic-reconfiguration (natural-gradient) solves.
//!
//! The SR update solves `(S + εI)·δ = F` with `S` the covariance of the
//! log-derivative vectors. Beyond a dense route there is a reduced solve
//! that exploits the batch structure: every `O` row is a combination of
//! one real network-gradient column per distinct configuration plus the
//! circuit coordinates, so `S = Q·M·Qᵀ` with `Q` of rank at most
//! `K = 2U + P_c` (U distinct configurations, `P_c` circuit parameters)
//! and `F` lies in the range of `Q`. Solving the `K×K` system
//! `(M·QᵀQ + εI)ξ = f` and expanding `δ = Qξ` reproduces the dense
//! solution exactly; a residual check in the full parameter space guards
//! the shortcut and falls back to the dense route if it ever degrades.

use nalgebra::{DMatrix, DVector};

use crate::error::{CoreError, Result};
use crate::estimators::SampleBatch;
use crate::scalar::Scalar;

/// Denominator guard in Adam's update.
pub const ADAM_EPS: f64 = 1e-8;

/// Update rule for a training run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method<T> {
    /// Natural-gradient step `δ = (S + εI)⁻¹F`.
    Sr { epsilon: T },
    /// First-order step with bias-corrected moment estimates.
    Adam { beta1: T, beta2: T },
}

impl<T: Scalar> Method<T> {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Method::Sr { epsilon } => {
                if !epsilon.is_positive_finite() {
                    return Err(CoreError::InvalidInput(format!(
                        "SR regularization must be positive, got {epsilon:?}"
                    )));
                }
            }
            Method::Adam { beta1, beta2 } => {
                for (name, b) in [("beta1", beta1), ("beta2", beta2)] {
                    if !(b > T::zero() && b < T::one()) {
                        return Err(CoreError::InvalidInput(format!(
                            "Adam {name} must lie in (0, 1), got {b:?}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Relative residual bound accepted from the reduced SR solve.
pub const SR_RESIDUAL_TOL: f64 = 1e-10;

/// Cosine decay from `eta_init` at `t = 0` to `eta_min` at `t = n`.
///
/// # Panics
/// If `n` is zero or `t` exceeds `n`.
pub fn cosine_lr<T: Scalar>(eta_init: T, eta_min: T, t: u64, n: u64) -> T {
    assert!(n > 0, "schedule phase must have at least one step");
    assert!(t <= n, "step {t} outside schedule phase of length {n}");
    let ratio = T::of_f64(t as f64) / T::of_f64(n as f64);
    let half = T::of_f64(0.5);
    eta_min + half * (eta_init - eta_min) * (T::one() + (T::pi() * ratio).cos())
}

/// Adam moment accumulators for one parameter block.
///
/// The step counter advances only when the block takes a step, so frozen
/// blocks keep their bias correction consistent when they thaw.
#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    m: Vec<T>,
    v: Vec<T>,
    t: u64,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
            t: 0,
        }
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    pub fn steps_taken(&self) -> u64 {
        self.t
    }

    pub fn moments(&self) -> (&[T], &[T]) {
        (&self.m, &self.v)
    }

    /// Restore a checkpointed state.
    pub fn from_parts(m: Vec<T>, v: Vec<T>, t: u64) -> Result<Self> {
        if m.len() != v.len() {
            return Err(CoreError::InvalidInput(format!(
                "moment lengths differ: {} vs {}",
                m.len(),
                v.len()
            )));
        }
        Ok(Self { m, v, t })
    }

    /// One bias-corrected step; returns the descent update to subtract
    /// from the parameters.
    pub fn step(&mut self, grad: &[T], lr: T, beta1: T, beta2: T) -> Vec<T> {
        assert_eq!(grad.len(), self.m.len(), "gradient length mismatch");
        self.t += 1;
        let t_i = self.t as i32;
        let bc1 = T::one() - beta1.powi(t_i);
        let bc2 = T::one() - beta2.powi(t_i);
        let eps = T::of_f64(ADAM_EPS);
        grad.iter()
            .zip(self.m.iter_mut().zip(self.v.iter_mut()))
            .map(|(&g, (m, v))| {
                *m = beta1 * *m + (T::one() - beta1) * g;
                *v = beta2 * *v + (T::one() - beta2) * g * g;
                let m_hat = *m / bc1;
                let v_hat = *v / bc2;
                lr * m_hat / (v_hat.sqrt() + eps)
            })
            .collect()
    }
}

/// Result of a stochastic-reconfiguration solve.
pub struct SrStep<T> {
    /// Solution of `(S + εI)·δ = F`.
    pub delta: Vec<T>,
    /// `‖(S + εI)·δ − F‖₂` evaluated in the full parameter space.
    pub residual: T,
    /// Whether the reduced route produced the answer.
    pub reduced: bool,
}

/// Dense solve of `(S + εI)x = F`: Cholesky first, singular-value
/// fallback if the factorization fails numerically.
pub fn sr_step_dense<T: Scalar>(
    s: &DMatrix<T>,
    f: &DVector<T>,
    epsilon: T,
) -> Result<DVector<T>> {
    let p = s.nrows();
    if s.ncols() != p || f.len() != p {
        return Err(CoreError::InvalidInput(format!(
            "curvature matrix {}x{} against gradient of length {}",
            s.nrows(),
            s.ncols(),
            f.len()
        )));
    }
    let mut reg = s.clone();
    for i in 0..p {
        reg[(i, i)] += epsilon;
    }
    if let Some(chol) = reg.clone().cholesky() {
        return Ok(chol.solve(f));
    }
    let svd = reg.svd(true, true);
    svd.solve(f, T::of_f64(1e-14))
        .map(|x| DVector::from_column_slice(x.as_slice()))
        .map_err(|e| CoreError::SolveFailed(e.to_string()))
}

/// Per-entry data the reduced solve needs, pulled out of a batch.
struct ReducedInputs<T> {
    /// Combined weights `frequency·ω`, summing to one.
    w: Vec<T>,
    /// Network log-probability gradients per entry (transformer block).
    a: Vec<Vec<T>>,
    /// Phase-network gradients per entry (phase block).
    b: Vec<Vec<T>>,
    /// Circuit log-derivative rows per entry, split into real and
    /// imaginary parts.
    c_re: Vec<Vec<T>>,
    c_im: Vec<Vec<T>>,
    e_re: Vec<T>,
    e_im: Vec<T>,
    lens: (usize, usize, usize),
}

impl<T: Scalar> ReducedInputs<T> {
    fn from_batch(batch: &SampleBatch<T>) -> Self {
        let lens = batch.o_lengths();
        let entries = batch.entries();
        let u = entries.len();
        let mut out = Self {
            w: Vec::with_capacity(u),
            a: Vec::with_capacity(u),
            b: Vec::with_capacity(u),
            c_re: Vec::with_capacity(u),
            c_im: Vec::with_capacity(u),
            e_re: Vec::with_capacity(u),
            e_im: Vec::with_capacity(u),
            lens,
        };
        for e in entries {
            out.w.push(e.frequency * e.omega);
            out.a
                .push(e.o_row.lnp.clone().unwrap_or_else(|| vec![T::zero(); lens.0]));
            out.b
                .push(e.o_row.gamma.clone().unwrap_or_else(|| vec![T::zero(); lens.1]));
            let mut re = vec![T::zero(); lens.2];
            let mut im = vec![T::zero(); lens.2];
            for (j, z) in e.o_row.circuit.iter().enumerate() {
                re[j] = z.re;
                im[j] = z.im;
            }
            out.c_re.push(re);
            out.c_im.push(im);
            out.e_re.push(e.e_loc.re);
            out.e_im.push(e.e_loc.im);
        }
        out
    }

    fn n_entries(&self) -> usize {
        self.w.len()
    }

    fn param_len(&self) -> usize {
        self.lens.0 + self.lens.1 + self.lens.2
    }

    fn reduced_dim(&self) -> usize {
        2 * self.n_entries() + self.lens.2
    }

    /// Expand a reduced coefficient vector: `x = Q·ξ`.
    fn expand(&self, xi: &DVector<T>) -> DVector<T> {
        let (lt, lp, lc) = self.lens;
        let u = self.n_entries();
        let mut x = DVector::from_element(self.param_len(), T::zero());
        for k in 0..u {
            let ca = xi[k];
            let cb = xi[u + k];
            for i in 0..lt {
                x[i] += ca * self.a[k][i];
            }
            for i in 0..lp {
                x[lt + i] += cb * self.b[k][i];
            }
        }
        for j in 0..lc {
            x[lt + lp + j] = xi[2 * u + j];
        }
        x
    }

    /// Apply `S + εI` to a full-space vector through the factored form
    /// `S = Σ w(ααᵀ + ββᵀ) − m_α m_αᵀ − m_β m_βᵀ`, without building `S`.
    fn apply_regularized(&self, x: &DVector<T>, epsilon: T) -> DVector<T> {
        let (lt, lp, lc) = self.lens;
        let u = self.n_entries();
        let p = self.param_len();
        let mut y = DVector::from_element(p, T::zero());
        let mut m_alpha = DVector::from_element(p, T::zero());
        let mut m_beta = DVector::from_element(p, T::zero());
        let mut m_alpha_dot = T::zero();
        let mut m_beta_dot = T::zero();
        for k in 0..u {
            let w = self.w[k];
            // α = [a; 0; Re c], β = [0; b; Im c].
            let mut adot = T::zero();
            let mut bdot = T::zero();
            for i in 0..lt {
                adot += self.a[k][i] * x[i];
            }
            for i in 0..lp {
                bdot += self.b[k][i] * x[lt + i];
            }
            for j in 0..lc {
                adot += self.c_re[k][j] * x[lt + lp + j];
                bdot += self.c_im[k][j] * x[lt + lp + j];
            }
            for i in 0..lt {
                y[i] += w * adot * self.a[k][i];
                m_alpha[i] += w * self.a[k][i];
            }
            for i in 0..lp {
                y[lt + i] += w * bdot * self.b[k][i];
                m_beta[lt + i] += w * self.b[k][i];
            }
            for j in 0..lc {
                y[lt + lp + j] += w * (adot * self.c_re[k][j] + bdot * self.c_im[k][j]);
                m_alpha[lt + lp + j] += w * self.c_re[k][j];
                m_beta[lt + lp + j] += w * self.c_im[k][j];
            }
            m_alpha_dot += w * adot;
            m_beta_dot += w * bdot;
        }
        for i in 0..p {
            y[i] -= m_alpha_dot * m_alpha[i] + m_beta_dot * m_beta[i];
            y[i] += epsilon * x[i];
        }
        y
    }
}

/// Reduced-space SR solve; exact whenever the reduced system solves
/// cleanly, which the caller verifies through the returned expansion.
fn solve_reduced<T: Scalar>(inputs: &ReducedInputs<T>, epsilon: T) -> Result<DVector<T>> {
    let (lt, lp, lc) = inputs.lens;
    let u = inputs.n_entries();
    let k_dim = inputs.reduced_dim();

    // Reduced coordinates of α_k: unit vector e_k plus the circuit tail;
    // of β_k: unit vector e_{U+k} plus the circuit tail.
    let alpha_bar = |k: usize| -> DVector<T> {
        let mut v = DVector::from_element(k_dim, T::zero());
        v[k] = T::one();
        for j in 0..lc {
            v[2 * u + j] = inputs.c_re[k][j];
        }
        v
    };
    let beta_bar = |k: usize| -> DVector<T> {
        let mut v = DVector::from_element(k_dim, T::zero());
        v[u + k] = T::one();
        for j in 0..lc {
            v[2 * u + j] = inputs.c_im[k][j];
        }
        v
    };

    let mut m = DMatrix::from_element(k_dim, k_dim, T::zero());
    let mut m_alpha = DVector::from_element(k_dim, T::zero());
    let mut m_beta = DVector::from_element(k_dim, T::zero());
    let mut f = DVector::from_element(k_dim, T::zero());
    let mut e_re_mean = T::zero();
    let mut e_im_mean = T::zero();
    for k in 0..u {
        let w = inputs.w[k];
        let ab = alpha_bar(k);
        let bb = beta_bar(k);
        m.syger(w, &ab, &ab, T::one());
        m.syger(w, &bb, &bb, T::one());
        m_alpha.axpy(w, &ab, T::one());
        m_beta.axpy(w, &bb, T::one());
        f.axpy(w * inputs.e_re[k], &ab, T::one());
        f.axpy(w * inputs.e_im[k], &bb, T::one());
        e_re_mean += w * inputs.e_re[k];
        e_im_mean += w * inputs.e_im[k];
    }
    // syger fills the lower triangle; mirror it.
    for i in 0..k_dim {
        for j in (i + 1)..k_dim {
            m[(i, j)] = m[(j, i)];
        }
    }
    m.syger(-T::one(), &m_alpha, &m_alpha, T::one());
    m.syger(-T::one(), &m_beta, &m_beta, T::one());
    for i in 0..k_dim {
        for j in (i + 1)..k_dim {
            m[(i, j)] = m[(j, i)];
        }
    }
    f.axpy(-e_re_mean, &m_alpha, T::one());
    f.axpy(-e_im_mean, &m_beta, T::one());
    f *= T::of_f64(2.0);

    // G = QᵀQ is block-diagonal: Gram matrices of the network gradient
    // columns plus the identity on circuit coordinates.
    let mut g = DMatrix::from_element(k_dim, k_dim, T::zero());
    for k in 0..u {
        for l in 0..u {
            let mut dot_a = T::zero();
            for i in 0..lt {
                dot_a += inputs.a[k][i] * inputs.a[l][i];
            }
            g[(k, l)] = dot_a;
            let mut dot_b = T::zero();
            for i in 0..lp {
                dot_b += inputs.b[k][i] * inputs.b[l][i];
            }
            g[(u + k, u + l)] = dot_b;
        }
    }
    for j in 0..lc {
        g[(2 * u + j, 2 * u + j)] = T::one();
    }

    let mut system = &m * &g;
    for i in 0..k_dim {
        system[(i, i)] += epsilon;
    }
    let xi = system
        .full_piv_lu()
        .solve(&f)
        .ok_or_else(|| CoreError::SolveFailed("reduced SR system is singular".into()))?;
    Ok(inputs.expand(&xi))
}

/// Solve `(S + εI)·δ = F` for one batch, choosing the reduced route when
/// its dimension beats the full parameter count and verifying the result
/// against the exact residual; falls back to the dense route otherwise.
pub fn sr_solve<T: Scalar>(
    batch: &SampleBatch<T>,
    grad: &[T],
    epsilon: T,
) -> Result<SrStep<T>> {
    if !epsilon.is_positive_finite() {
        return Err(CoreError::InvalidInput(
            "SR regularization must be positive".into(),
        ));
    }
    let inputs = ReducedInputs::from_batch(batch);
    let p = inputs.param_len();
    if grad.len() != p {
        return Err(CoreError::InvalidInput(format!(
            "gradient length {} does not match parameter count {p}",
            grad.len()
        )));
    }
    let f = DVector::from_column_slice(grad);
    let f_norm = f.norm();
    let tol = T::of_f64(SR_RESIDUAL_TOL) * if f_norm > T::one() { f_norm } else { T::one() };

    if inputs.reduced_dim() < p {
        if let Ok(x) = solve_reduced(&inputs, epsilon) {
            let residual = (inputs.apply_regularized(&x, epsilon) - &f).norm();
            if residual <= tol {
                return Ok(SrStep {
                    delta: x.as_slice().to_vec(),
                    residual,
                    reduced: true,
                });
            }
        }
    }

    let s = batch.dense_s_matrix();
    let x = sr_step_dense(&s, &f, epsilon)?;
    let residual = (inputs.apply_regularized(&x, epsilon) - &f).norm();
    Ok(SrStep {
        delta: x.as_slice().to_vec(),
        residual,
        reduced: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cosine_schedule_hits_endpoints_and_decreases() {
        let n = 100;
        let lr0: f64 = cosine_lr(5e-2, 5e-3, 0, n);
        let lr_mid: f64 = cosine_lr(5e-2, 5e-3, n / 2, n);
        let lr_n: f64 = cosine_lr(5e-2, 5e-3, n, n);
        assert!((lr0 - 5e-2).abs() <= 1e-15);
        assert!((lr_mid - (5e-2 + 5e-3) / 2.0).abs() <= 1e-15);
        assert!((lr_n - 5e-3).abs() <= 1e-15);
        let mut prev = f64::INFINITY;
        for t in 0..=n {
            let lr: f64 = cosine_lr(5e-2, 5e-3, t, n);
            assert!(lr < prev);
            prev = lr;
        }
    }

    #[test]
    #[should_panic(expected = "outside schedule phase")]
    fn cosine_schedule_rejects_overrun() {
        let _ = cosine_lr::<f64>(1e-2, 1e-3, 11, 10);
    }

    #[test]
    fn adam_first_steps_match_hand_formula() {
        let beta1: f64 = 0.9;
        let beta2: f64 = 0.999;
        let lr: f64 = 1e-3;
        let g1: [f64; 2] = [0.5, -2.0];
        let g2: [f64; 2] = [-0.25, 1.0];
        let mut state = AdamState::new(2);

        let u1 = state.step(&g1, lr, beta1, beta2);
        // After one step the bias corrections cancel the (1−β) factors:
        // m̂ = g, v̂ = g², so the update is lr·g/(|g|+ε).
        for i in 0..2 {
            let expect = lr * g1[i] / (g1[i].abs() + ADAM_EPS);
            assert!((u1[i] - expect).abs() <= 1e-15, "step 1 coord {i}");
        }

        let u2 = state.step(&g2, lr, beta1, beta2);
        for i in 0..2 {
            let m = beta1 * (1.0 - beta1) * g1[i] + (1.0 - beta1) * g2[i];
            let v = beta2 * (1.0 - beta2) * g1[i] * g1[i] + (1.0 - beta2) * g2[i] * g2[i];
            let m_hat = m / (1.0 - beta1 * beta1);
            let v_hat = v / (1.0 - beta2 * beta2);
            let expect = lr * m_hat / (v_hat.sqrt() + ADAM_EPS);
            assert!((u2[i] - expect).abs() <= 1e-15, "step 2 coord {i}");
        }
        assert_eq!(state.steps_taken(), 2);
    }

    #[test]
    fn adam_descends_a_quadratic() {
        let target = [1.5, -0.75, 0.3];
        let mut x = [0.0f64; 3];
        let mut state = AdamState::new(3);
        for _ in 0..2000 {
            let grad: Vec<f64> = (0..3).map(|i| x[i] - target[i]).collect();
            let update = state.step(&grad, 5e-3, 0.9, 0.999);
            for i in 0..3 {
                x[i] -= update[i];
            }
        }
        for i in 0..3 {
            assert!((x[i] - target[i]).abs() <= 1e-3, "coordinate {i}: {}", x[i]);
        }
    }

    #[test]
    fn dense_solve_satisfies_the_linear_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let p = 12;
        let a = DMatrix::from_fn(p, p, |_, _| rng.gen_range(-1.0..1.0));
        let s = &a * a.transpose();
        let f = DVector::from_fn(p, |_, _| rng.gen_range(-1.0..1.0));
        let eps = 1e-4;
        let x = sr_step_dense(&s, &f, eps).unwrap();
        let mut reg = s.clone();
        for i in 0..p {
            reg[(i, i)] += eps;
        }
        let residual = (&reg * &x - &f).norm();
        assert!(residual <= 1e-10, "residual {residual}");
    }

    #[test]
    fn dense_solve_handles_rank_deficiency() {
        // Rank-1 curvature: regularization carries the null space.
        let v = DVector::from_column_slice(&[1.0, 2.0, -1.0]);
        let s = &v * v.transpose();
        let f = DVector::from_column_slice(&[0.5, -0.25, 1.0]);
        let eps = 1e-3;
        let x = sr_step_dense(&s, &f, eps).unwrap();
        let mut reg = s.clone();
        for i in 0..3 {
            reg[(i, i)] += eps;
        }
        assert!((&reg * &x - &f).norm() <= 1e-10);
    }

    /// Synthetic batch shaped like real estimator output: a handful of
    /// distinct configurations against a parameter space large enough
    /// that the reduced route engages.
    mod reduced {
        use super::*;
        use crate::pauli::Configuration;
        use crate::wavefunction::{LogPsi, ORow};
        use num_complex::Complex64;

        pub fn synthetic_batch(
            u: usize,
            lens: (usize, usize, usize),
            gamma_active: bool,
        ) -> SampleBatch<f64> {
            let mut rng = ChaCha8Rng::seed_from_u64(23);
            let counts: Vec<u64> = (0..u).map(|_| rng.gen_range(1..5)).collect();
            let total: u64 = counts.iter().sum();
            let entries: Vec<crate::estimators::BatchEntry<f64>> = (0..u)
                .map(|k| {
                    let wl = rng.gen_range(-0.5..0.5);
                    crate::estimators::BatchEntry {
                        config: Configuration::new(k as u64, 8),
                        frequency: counts[k] as f64 / total as f64,
                        log_psi: LogPsi {
                            value: Complex64::new(0.0, 0.0),
                            half_log_p: 0.0,
                            gamma: 0.0,
                            f1: wl / 2.0,
                            f2: 0.0,
                            amp_log: wl / 2.0,
                            amp_z: Vec::new(),
                            phase_z: Vec::new(),
                        },
                        e_loc: Complex64::new(rng.gen_range(-2.0..0.0), rng.gen_range(-0.1..0.1)),
                        o_row: ORow {
                            lnp: Some((0..lens.0).map(|_| rng.gen_range(-0.3..0.3)).collect()),
                            gamma: if gamma_active {
                                Some((0..lens.1).map(|_| rng.gen_range(-0.3..0.3)).collect())
                            } else {
                                None
                            },
                            circuit: (0..lens.2)
                                .map(|_| {
                                    Complex64::new(
                                        rng.gen_range(-0.3..0.3),
                                        rng.gen_range(-0.3..0.3),
                                    )
                                })
                                .collect(),
                        },
                        omega: 0.0,
                    }
                })
                .collect();
            SampleBatch::from_raw_parts_for_tests(entries, Some(total), lens)
        }
    }

    #[test]
    fn reduced_solve_matches_dense_solve() {
        let lens = (50, 30, 4);
        let batch = reduced::synthetic_batch(6, lens, true);
        let est = batch.estimate();
        let eps = 1e-3;
        let step = sr_solve(&batch, &est.grad, eps).unwrap();
        assert!(step.reduced, "reduced route should engage: K=16 < P=84");
        assert!(step.residual <= 1e-10, "residual {}", step.residual);

        let s = batch.dense_s_matrix();
        let f = DVector::from_column_slice(&est.grad);
        let dense = sr_step_dense(&s, &f, eps).unwrap();
        for i in 0..dense.len() {
            assert!(
                (step.delta[i] - dense[i]).abs() <= 1e-8 * dense[i].abs().max(1.0),
                "coordinate {i}: reduced {} vs dense {}",
                step.delta[i],
                dense[i]
            );
        }
    }

    #[test]
    fn reduced_solve_zeroes_inactive_blocks() {
        let lens = (40, 25, 3);
        let batch = reduced::synthetic_batch(5, lens, false);
        let est = batch.estimate();
        let step = sr_solve(&batch, &est.grad, 1e-3).unwrap();
        assert!(step.reduced);
        // No phase-network log derivatives anywhere in the batch means the
        // gradient is zero there and the update must be exactly zero.
        for i in lens.0..lens.0 + lens.1 {
            assert_eq!(step.delta[i], 0.0, "phase coordinate {i}");
        }
    }

    #[test]
    fn dense_route_reports_small_residual_too() {
        // Force the dense route by making the reduced dimension larger
        // than the parameter count.
        let lens = (3, 2, 2);
        let batch = reduced::synthetic_batch(6, lens, true);
        let est = batch.estimate();
        let step = sr_solve(&batch, &est.grad, 1e-3).unwrap();
        assert!(!step.reduced, "K=14 > P=7 must use the dense route");
        assert!(step.residual <= 1e-10, "residual {}", step.residual);
    }
}
