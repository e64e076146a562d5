//! Second-quantized fermionic operators and the Jordan–Wigner mapping.
//!
//! A fermionic problem is specified by one-body coefficients `h_{ij}` and
//! two-body coefficients `h_{ijkl}` over spin-orbitals, with the Hamiltonian
//!
//! ```text
//! H = Σ_{ij} h_{ij} c†_i c_j + ½ Σ_{ijkl} h_{ijkl} c†_i c†_j c_k c_l .
//! ```
//!
//! Spin-orbital `j` maps to qubit `j`; a set bit means occupied. Ladder
//! operators become Pauli strings through
//!
//! ```text
//! c†_j = ½ (X_j − i Y_j) · Z_{j−1} ⋯ Z_0 ,
//! c_j  = ½ (X_j + i Y_j) · Z_{j−1} ⋯ Z_0 ,
//! ```
//!
//! and products of ladder operators are expanded with exact phase tracking;
//! the result must come out with real coefficients, which
//! [`HamiltonianBuilder`] verifies.
//!
//! The conventional interleaved ordering for spatial orbitals puts the
//! up-spin orbital `p` on qubit `2p` and the down-spin orbital on `2p + 1`;
//! helpers for that convention live with the particle-number mask.

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::pauli::{Hamiltonian, HamiltonianBuilder, PauliString, MAX_QUBITS};
use crate::scalar::Scalar;

/// A fermionic Hamiltonian in second quantization over spin-orbitals.
#[derive(Clone, Debug, Default)]
pub struct FermionicOperators<T> {
    n_spin_orbitals: usize,
    one_body: Vec<(usize, usize, T)>,
    two_body: Vec<(usize, usize, usize, usize, T)>,
}

impl<T: Scalar> FermionicOperators<T> {
    pub fn new(n_spin_orbitals: usize) -> Result<Self> {
        if n_spin_orbitals == 0 || n_spin_orbitals > MAX_QUBITS {
            return Err(CoreError::TooManyQubits {
                what: "fermionic operator set",
                got: n_spin_orbitals,
                max: MAX_QUBITS,
            });
        }
        Ok(Self {
            n_spin_orbitals,
            one_body: Vec::new(),
            two_body: Vec::new(),
        })
    }

    #[inline]
    pub fn n_spin_orbitals(&self) -> usize {
        self.n_spin_orbitals
    }

    /// Add a term `v · c†_i c_j`.
    pub fn add_one_body(&mut self, i: usize, j: usize, v: T) -> Result<&mut Self> {
        self.check_index(i)?;
        self.check_index(j)?;
        self.one_body.push((i, j, v));
        Ok(self)
    }

    /// Add a term `(v/2) · c†_i c†_j c_k c_l` (the ½ is applied by the
    /// mapping, matching the conventional two-body normalization).
    pub fn add_two_body(&mut self, i: usize, j: usize, k: usize, l: usize, v: T) -> Result<&mut Self> {
        for idx in [i, j, k, l] {
            self.check_index(idx)?;
        }
        self.two_body.push((i, j, k, l, v));
        Ok(self)
    }

    pub fn one_body(&self) -> &[(usize, usize, T)] {
        &self.one_body
    }

    pub fn two_body(&self) -> &[(usize, usize, usize, usize, T)] {
        &self.two_body
    }

    fn check_index(&self, i: usize) -> Result<()> {
        if i >= self.n_spin_orbitals {
            return Err(CoreError::InvalidInput(format!(
                "spin-orbital index {i} out of range for {} orbitals",
                self.n_spin_orbitals
            )));
        }
        Ok(())
    }

    /// Verify that the accumulated one-body matrix is symmetric. Two-body
    /// Hermiticity violations surface later as complex Pauli coefficients.
    fn check_one_body_hermitian(&self) -> Result<()> {
        let n = self.n_spin_orbitals;
        let mut dense = vec![T::zero(); n * n];
        for &(i, j, v) in &self.one_body {
            dense[i * n + j] += v;
        }
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (dense[i * n + j] - dense[j * n + i]).abs();
                if d > T::of_f64(1e-12) {
                    return Err(CoreError::NonHermitian(format!(
                        "one-body matrix: h[{i},{j}] != h[{j},{i}] (difference {:e})",
                        d.to_f64()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// One ladder operator expanded as Pauli terms: `½ (X_j ∓ i Y_j) Z_{<j}`.
fn ladder_terms<T: Scalar>(j: usize, dagger: bool) -> [(Complex<T>, PauliString); 2] {
    let tail = (1u64 << j) - 1; // Z on every qubit below j
    let x_string = PauliString {
        x: 1 << j,
        z: tail,
    };
    let y_string = PauliString {
        x: 1 << j,
        z: tail | (1 << j),
    };
    let half = T::of_f64(0.5);
    let y_coeff = if dagger { -half } else { half };
    [
        (Complex::new(half, T::zero()), x_string),
        (Complex::new(T::zero(), y_coeff), y_string),
    ]
}

/// Expand a product of ladder operators (leftmost factor first) into Pauli
/// terms with exact phases.
fn expand_product<T: Scalar>(
    factors: &[(usize, bool)],
) -> Vec<(Complex<T>, PauliString)> {
    let mut acc: Vec<(Complex<T>, PauliString)> =
        vec![(Complex::new(T::one(), T::zero()), PauliString::IDENTITY)];
    for &(j, dagger) in factors {
        let factor = ladder_terms::<T>(j, dagger);
        let mut next = Vec::with_capacity(acc.len() * 2);
        for &(c1, p1) in &acc {
            for &(c2, p2) in &factor {
                let (phase, p12) = p1 * p2;
                next.push((c1 * c2 * phase.to_complex::<T>(), p12));
            }
        }
        acc = next;
    }
    acc
}

/// Map a fermionic Hamiltonian to a qubit [`Hamiltonian`] under the
/// Jordan–Wigner encoding. Rejects operator sets whose one-body matrix is
/// not symmetric, and any input whose Pauli expansion fails the final
/// Hermiticity check.
pub fn jordan_wigner<T: Scalar>(ops: &FermionicOperators<T>) -> Result<Hamiltonian<T>> {
    ops.check_one_body_hermitian()?;
    let mut builder = HamiltonianBuilder::new(ops.n_spin_orbitals)?;
    for &(i, j, v) in &ops.one_body {
        for (coeff, string) in expand_product::<T>(&[(i, true), (j, false)]) {
            builder.add_complex(coeff * v, string);
        }
    }
    let half = T::of_f64(0.5);
    for &(i, j, k, l, v) in &ops.two_body {
        for (coeff, string) in
            expand_product::<T>(&[(i, true), (j, true), (k, false), (l, false)])
        {
            builder.add_complex(coeff * (v * half), string);
        }
    }
    builder.finish()
}
