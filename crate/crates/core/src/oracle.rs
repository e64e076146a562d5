//! Exact reference calculations: dense matrices, ground states, residuals.
//!
//! The dense matrix is assembled by an independent route from the sparse row
//! access in [`crate::pauli`]: each term is expanded as a Kronecker product
//! of 2×2 matrices. Tests compare the two representations entry by entry,
//! so a convention bug in either one cannot hide.
//!
//! Ground states come from a dense eigendecomposition up to `2^10`
//! dimensions and from shifted power iteration above that (also available
//! matrix-free through [`apply_hamiltonian`]). Every returned eigenpair
//! should be certified by the caller with [`residual_norm`].

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::pauli::{Configuration, Hamiltonian, PauliString};
use crate::scalar::Scalar;

/// Largest qubit count for which dense assembly is permitted (the matrix is
/// `4^n` complex entries).
pub const MAX_DENSE_QUBITS: usize = 12;

/// Largest dimension handled by the dense eigendecomposition path.
pub const MAX_EIGH_DIM: usize = 1 << 10;

fn pauli_matrix_2x2<T: Scalar>(x: bool, z: bool) -> DMatrix<Complex<T>> {
    let zero = Complex::new(T::zero(), T::zero());
    let one = Complex::new(T::one(), T::zero());
    let i = Complex::new(T::zero(), T::one());
    let entries = match (x, z) {
        (false, false) => [one, zero, zero, one],          // I
        (true, false) => [zero, one, one, zero],           // X
        (true, true) => [zero, -i, i, zero],               // Y
        (false, true) => [one, zero, zero, -one],          // Z
    };
    DMatrix::from_row_slice(2, 2, &entries)
}

/// Dense matrix of a single Pauli string on `n_qubits` qubits, built as a
/// Kronecker product with qubit 0 as the least significant factor.
pub fn string_to_dense<T: Scalar>(string: PauliString, n_qubits: usize) -> DMatrix<Complex<T>> {
    let mut acc = DMatrix::from_element(1, 1, Complex::new(T::one(), T::zero()));
    for i in (0..n_qubits).rev() {
        let m = pauli_matrix_2x2::<T>((string.x >> i) & 1 == 1, (string.z >> i) & 1 == 1);
        acc = acc.kronecker(&m);
    }
    acc
}

/// Dense matrix of a Hamiltonian. Errors for systems larger than
/// [`MAX_DENSE_QUBITS`].
pub fn to_dense<T: Scalar>(h: &Hamiltonian<T>) -> Result<DMatrix<Complex<T>>> {
    if h.n_qubits() > MAX_DENSE_QUBITS {
        return Err(CoreError::TooManyQubits {
            what: "dense matrix",
            got: h.n_qubits(),
            max: MAX_DENSE_QUBITS,
        });
    }
    let dim = 1usize << h.n_qubits();
    let mut acc = DMatrix::from_element(dim, dim, Complex::new(T::zero(), T::zero()));
    for &(coeff, string) in h.terms() {
        let m = string_to_dense::<T>(string, h.n_qubits());
        acc.zip_apply(&m, |a, b| *a += b * coeff);
    }
    Ok(acc)
}

/// Matrix-free application `y = H x` in the computational basis, using the
/// sparse column expansion. `x` is indexed by basis-state label.
pub fn apply_hamiltonian<T: Scalar>(h: &Hamiltonian<T>, x: &[Complex<T>]) -> Vec<Complex<T>> {
    let dim = 1usize << h.n_qubits();
    assert_eq!(x.len(), dim, "vector length must be 2^n_qubits");
    let mut y = vec![Complex::new(T::zero(), T::zero()); dim];
    for (s_idx, &amp) in x.iter().enumerate() {
        if amp.re == T::zero() && amp.im == T::zero() {
            continue;
        }
        let s = Configuration::new(s_idx as u64, h.n_qubits());
        for (target, coeff) in h.apply_to_basis(s) {
            y[target.index()] += coeff * amp;
        }
    }
    y
}

/// Max absolute deviation from Hermitian symmetry.
pub fn hermiticity_defect<T: Scalar>(m: &DMatrix<Complex<T>>) -> T {
    let mut worst = T::zero();
    for i in 0..m.nrows() {
        for j in i..m.ncols() {
            let d = m[(i, j)] - m[(j, i)].conj();
            worst = worst.max(d.re.abs()).max(d.im.abs());
        }
    }
    worst
}

/// `‖M v − e v‖₂` for a candidate eigenpair.
pub fn residual_norm<T: Scalar>(
    m: &DMatrix<Complex<T>>,
    energy: T,
    v: &DVector<Complex<T>>,
) -> T {
    let r = m * v - v.scale(energy);
    let mags: Vec<T> = r.iter().map(|c| c.norm_sqr()).collect();
    crate::scalar::pairwise_sum(&mags).sqrt()
}

/// Rayleigh quotient `Re(v† M v) / (v† v)`.
pub fn rayleigh_quotient<T: Scalar>(m: &DMatrix<Complex<T>>, v: &DVector<Complex<T>>) -> T {
    let mv = m * v;
    let num: Complex<T> = v.dotc(&mv);
    let den: T = v.norm_squared();
    num.re / den
}

fn check_hermitian<T: Scalar>(m: &DMatrix<Complex<T>>) -> Result<()> {
    let defect = hermiticity_defect(m);
    if defect > T::of_f64(1e-10) {
        return Err(CoreError::NonHermitian(format!(
            "matrix deviates from Hermitian symmetry by {:e}",
            defect.to_f64()
        )));
    }
    Ok(())
}

/// All eigenvalues of a Hermitian matrix, ascending. Dimension is capped at
/// [`MAX_EIGH_DIM`].
pub fn eigenvalues<T: Scalar>(m: &DMatrix<Complex<T>>) -> Result<Vec<T>> {
    check_hermitian(m)?;
    if m.nrows() > MAX_EIGH_DIM {
        return Err(CoreError::InvalidInput(format!(
            "eigenvalue decomposition capped at dimension {MAX_EIGH_DIM}, got {}",
            m.nrows()
        )));
    }
    let mut vals = if is_effectively_real(m) {
        let re = m.map(|c| c.re);
        SymmetricEigen::new(re).eigenvalues.iter().copied().collect::<Vec<T>>()
    } else {
        let emb = real_embedding(m);
        // The embedding doubles multiplicities: eigenvalues come in pairs.
        let mut all: Vec<T> = SymmetricEigen::new(emb).eigenvalues.iter().copied().collect();
        all.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
        all.into_iter().step_by(2).collect()
    };
    vals.sort_by(|a, b| a.partial_cmp(b).expect("eigenvalues are finite"));
    Ok(vals)
}

fn is_effectively_real<T: Scalar>(m: &DMatrix<Complex<T>>) -> bool {
    m.iter().all(|c| c.im == T::zero())
}

/// Real symmetric embedding `[[A, −B], [B, A]]` of the Hermitian matrix
/// `A + iB`. Each eigenpair `(λ, x + iy)` of the original appears twice,
/// as `(λ, [x; y])` and `(λ, [−y; x])`.
fn real_embedding<T: Scalar>(m: &DMatrix<Complex<T>>) -> DMatrix<T> {
    let n = m.nrows();
    let mut e = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let v = m[(i, j)];
            e[(i, j)] = v.re;
            e[(i, j + n)] = -v.im;
            e[(i + n, j)] = v.im;
            e[(i + n, j + n)] = v.re;
        }
    }
    e
}

/// Ground state of a Hermitian matrix by dense eigendecomposition.
///
/// Returns the lowest eigenvalue and a normalized eigenvector. For matrices
/// with purely real entries the decomposition runs directly on the real
/// part; otherwise the Hermitian problem is embedded as a real symmetric one
/// of twice the dimension.
pub fn ground_state_dense<T: Scalar>(
    m: &DMatrix<Complex<T>>,
) -> Result<(T, DVector<Complex<T>>)> {
    check_hermitian(m)?;
    if m.nrows() > MAX_EIGH_DIM {
        return Err(CoreError::InvalidInput(format!(
            "dense eigendecomposition capped at dimension {MAX_EIGH_DIM}, got {}",
            m.nrows()
        )));
    }
    if is_effectively_real(m) {
        let re = m.map(|c| c.re);
        let eig = SymmetricEigen::new(re);
        let (idx, &energy) = argmin(&eig.eigenvalues);
        let col = eig.eigenvectors.column(idx);
        let v = DVector::from_iterator(
            m.nrows(),
            col.iter().map(|&r| Complex::new(r, T::zero())),
        );
        return Ok((energy, v));
    }
    let emb = real_embedding(m);
    let eig = SymmetricEigen::new(emb);
    let (idx, &energy) = argmin(&eig.eigenvalues);
    let col = eig.eigenvectors.column(idx);
    let n = m.nrows();
    let mut v = DVector::from_element(n, Complex::new(T::zero(), T::zero()));
    for i in 0..n {
        v[i] = Complex::new(col[i], col[i + n]);
    }
    let norm = v.norm();
    Ok((energy, v.unscale(norm)))
}

fn argmin<T: Scalar>(vals: &DVector<T>) -> (usize, &T) {
    vals.iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.partial_cmp(b).expect("eigenvalues are finite"))
        .expect("non-empty spectrum")
}

/// Ground state by shifted power iteration on `σI − H`, where `σ` upper
/// bounds the spectrum via the coefficient 1-norm. Works at any dimension
/// the sparse row access supports; convergence is certified by the residual
/// bound `tol` (an error is returned if `max_iters` is exhausted first).
///
/// The starting vector is deterministic. With a degenerate ground level the
/// iteration converges to some vector in the ground space, which is exactly
/// what the residual certifies.
pub fn ground_state_power<T: Scalar>(
    h: &Hamiltonian<T>,
    tol: T,
    max_iters: usize,
) -> Result<(T, Vec<Complex<T>>)> {
    let n = h.n_qubits();
    assert!(n <= 26, "power iteration on 2^{n} amplitudes is unreasonable");
    let dim = 1usize << n;
    let sigma = h.coefficient_norm() + T::one();

    // Deterministic, unstructured start: decaying amplitudes with mixed
    // signs so no symmetry sector is accidentally excluded.
    let mut v: Vec<Complex<T>> = (0..dim)
        .map(|i| {
            let x = T::of_usize(i + 1);
            Complex::new(
                T::one() / x.sqrt(),
                if i % 3 == 0 { T::of_f64(0.1) } else { T::of_f64(-0.05) },
            )
        })
        .collect();
    normalize(&mut v);

    for _ in 0..max_iters {
        let hv = apply_hamiltonian(h, &v);
        // Rayleigh quotient and residual for the *current* vector.
        let num: Vec<Complex<T>> = v
            .iter()
            .zip(&hv)
            .map(|(a, b)| a.conj() * b)
            .collect();
        let energy = crate::scalar::pairwise_sum(&num).re;
        let res_terms: Vec<T> = v
            .iter()
            .zip(&hv)
            .map(|(a, b)| (b - a * energy).norm_sqr())
            .collect();
        let residual = crate::scalar::pairwise_sum(&res_terms).sqrt();
        if residual <= tol {
            return Ok((energy, v));
        }
        // w = (σI − H) v, then normalize.
        for (w, hv_i) in v.iter_mut().zip(&hv) {
            *w = *w * sigma - hv_i;
        }
        normalize(&mut v);
    }
    Err(CoreError::SolveFailed(format!(
        "power iteration did not reach residual {:e} in {max_iters} iterations",
        tol.to_f64()
    )))
}

fn normalize<T: Scalar>(v: &mut [Complex<T>]) {
    let sq: Vec<T> = v.iter().map(|c| c.norm_sqr()).collect();
    let norm = crate::scalar::pairwise_sum(&sq).sqrt();
    for c in v.iter_mut() {
        *c = c.unscale(norm);
    }
}

/// Ground-state energy of a Hamiltonian, choosing the dense path when the
/// dimension allows and certified power iteration otherwise.
pub fn ground_energy<T: Scalar>(h: &Hamiltonian<T>) -> Result<T> {
    let dim = 1usize << h.n_qubits();
    if dim <= MAX_EIGH_DIM {
        let m = to_dense(h)?;
        let (e, _) = ground_state_dense(&m)?;
        Ok(e)
    } else {
        let (e, _) = ground_state_power(h, T::of_f64(1e-9), 200_000)?;
        Ok(e)
    }
}
