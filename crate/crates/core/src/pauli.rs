//! Pauli-string algebra and sparse Hamiltonian row access.
//!
//! A Pauli string on `n` qubits is stored as a pair of bitmasks `(x, z)`:
//! bit `i` of `x` set means the string acts on qubit `i` with a bit flip,
//! bit `i` of `z` set means it acts with a sign; both set means `Y`. The
//! encoded operator is the literal tensor product of the single-qubit
//! matrices (letter `I`, `X`, `Y`, or `Z` per qubit), so for a computational
//! basis state with bit pattern `s`:
//!
//! ```text
//! P |s⟩ = i^{|y|} · (−1)^{popcount(z & s)} · |s ⊕ x⟩,      y = x & z,
//! ```
//!
//! which reproduces `Y|0⟩ = i|1⟩` and `Y|1⟩ = −i|0⟩`. Phases of string
//! products are tracked exactly as fourth roots of unity.
//!
//! Basis-state bit order: qubit `i` is bit `i` of the integer label (qubit 0
//! is the least significant bit), and `s_i = 0` is spin-up. When a
//! configuration is printed, qubit 0 is the leftmost character.
//!
//! A [`Hamiltonian`] is a real-coefficient sum of strings, canonically
//! merged and additionally grouped by flip mask `x` so that one group
//! produces one connected configuration: the row
//! `⟨s|H|s'⟩` with `s' = s ⊕ x` is the sum of the group's terms, each
//! contributing `coeff · i^{|y|} · (−1)^{popcount(z & s')}`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex;

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

/// Hard cap on qubit count imposed by the `u64` bitmask representation.
pub const MAX_QUBITS: usize = 64;

/// Coefficients with absolute value below this are dropped when merging
/// terms and when thinning Hamiltonian rows.
pub const COEFF_TOLERANCE: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Phase
// ---------------------------------------------------------------------------

/// A fourth root of unity, `i^k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Phase {
    One,
    I,
    MinusOne,
    MinusI,
}

impl Phase {
    /// `i^k` for any exponent.
    #[inline]
    pub fn from_exponent(k: u32) -> Self {
        match k % 4 {
            0 => Phase::One,
            1 => Phase::I,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    #[inline]
    pub fn exponent(self) -> u32 {
        match self {
            Phase::One => 0,
            Phase::I => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    #[inline]
    pub fn to_complex<T: Scalar>(self) -> Complex<T> {
        match self {
            Phase::One => Complex::new(T::one(), T::zero()),
            Phase::I => Complex::new(T::zero(), T::one()),
            Phase::MinusOne => Complex::new(-T::one(), T::zero()),
            Phase::MinusI => Complex::new(T::zero(), -T::one()),
        }
    }
}

impl std::ops::Mul for Phase {
    type Output = Phase;

    #[inline]
    // Fourth roots of unity multiply by adding exponents mod 4.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, other: Phase) -> Phase {
        Phase::from_exponent(self.exponent() + other.exponent())
    }
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// A computational basis state (spin configuration) on a fixed number of
/// qubits. Bit `i` of `bits` is the value measured on qubit `i`; `0` is
/// spin-up / unoccupied.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Configuration {
    bits: u64,
    n_qubits: u8,
}

impl Configuration {
    /// # Panics
    /// If `n_qubits` is 0 or exceeds [`MAX_QUBITS`], or `bits` has a set bit
    /// at position `n_qubits` or above.
    pub fn new(bits: u64, n_qubits: usize) -> Self {
        assert!(
            (1..=MAX_QUBITS).contains(&n_qubits),
            "qubit count {n_qubits} out of range"
        );
        if n_qubits < 64 {
            assert!(
                bits >> n_qubits == 0,
                "bit pattern {bits:#b} does not fit in {n_qubits} qubits"
            );
        }
        Self {
            bits,
            n_qubits: n_qubits as u8,
        }
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn n_qubits(self) -> usize {
        usize::from(self.n_qubits)
    }

    /// Value of qubit `i` as 0 or 1.
    #[inline]
    pub fn bit(self, i: usize) -> u8 {
        debug_assert!(i < self.n_qubits());
        ((self.bits >> i) & 1) as u8
    }

    /// Statevector index of this basis state.
    #[inline]
    pub fn index(self) -> usize {
        self.bits as usize
    }

    /// Number of qubits measured as 1.
    #[inline]
    pub fn count_ones(self) -> u32 {
        self.bits.count_ones()
    }

    /// The configuration with the bits under `mask` flipped.
    #[inline]
    pub fn flip(self, mask: u64) -> Self {
        Self {
            bits: self.bits ^ mask,
            n_qubits: self.n_qubits,
        }
    }

    /// All `2^n` configurations in increasing index order.
    ///
    /// # Panics
    /// If the enumeration would not fit in memory-addressable range
    /// (`n_qubits > 32`).
    pub fn all(n_qubits: usize) -> impl Iterator<Item = Configuration> {
        assert!(n_qubits <= 32, "refusing to enumerate 2^{n_qubits} states");
        (0..(1u64 << n_qubits)).map(move |bits| Configuration::new(bits, n_qubits))
    }

    /// Bits as `0`/`1` values, qubit 0 first.
    pub fn iter_bits(self) -> impl Iterator<Item = u8> {
        let bits = self.bits;
        (0..self.n_qubits()).map(move |i| ((bits >> i) & 1) as u8)
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter_bits() {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// PauliString
// ---------------------------------------------------------------------------

/// A tensor product of single-qubit Pauli matrices, encoded as `(x, z)`
/// bitmasks. The qubit count is carried by the containing structure; bits at
/// or above it must be clear.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PauliString {
    pub x: u64,
    pub z: u64,
}

impl PauliString {
    pub const IDENTITY: PauliString = PauliString { x: 0, z: 0 };

    /// Single-qubit `X_i`.
    #[inline]
    pub fn x_on(i: usize) -> Self {
        Self { x: 1 << i, z: 0 }
    }

    /// Single-qubit `Y_i`.
    #[inline]
    pub fn y_on(i: usize) -> Self {
        Self {
            x: 1 << i,
            z: 1 << i,
        }
    }

    /// Single-qubit `Z_i`.
    #[inline]
    pub fn z_on(i: usize) -> Self {
        Self { x: 0, z: 1 << i }
    }

    /// Parse a letter string like `"IXYZ"`; character `i` is the letter on
    /// qubit `i`, so qubit 0 is the leftmost character.
    pub fn from_letters(letters: &str) -> Result<Self> {
        if letters.len() > MAX_QUBITS {
            return Err(CoreError::TooManyQubits {
                what: "Pauli string",
                got: letters.len(),
                max: MAX_QUBITS,
            });
        }
        let mut x = 0u64;
        let mut z = 0u64;
        for (i, c) in letters.chars().enumerate() {
            match c {
                'I' => {}
                'X' => x |= 1 << i,
                'Y' => {
                    x |= 1 << i;
                    z |= 1 << i;
                }
                'Z' => z |= 1 << i,
                other => {
                    return Err(CoreError::InvalidInput(format!(
                        "invalid Pauli letter '{other}' at position {i}"
                    )))
                }
            }
        }
        Ok(Self { x, z })
    }

    /// Letter representation on `n_qubits` qubits (inverse of
    /// [`PauliString::from_letters`]).
    pub fn letters(self, n_qubits: usize) -> String {
        (0..n_qubits)
            .map(|i| match ((self.x >> i) & 1, (self.z >> i) & 1) {
                (0, 0) => 'I',
                (1, 0) => 'X',
                (1, 1) => 'Y',
                (0, 1) => 'Z',
                _ => unreachable!(),
            })
            .collect()
    }

    #[inline]
    pub fn is_identity(self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of qubits acted on non-trivially.
    #[inline]
    pub fn weight(self) -> u32 {
        (self.x | self.z).count_ones()
    }

    /// Number of `Y` letters.
    #[inline]
    pub fn y_count(self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Apply to a basis state: `P |s⟩ = phase · |s ⊕ x⟩`.
    #[inline]
    pub fn apply(self, s: Configuration) -> (Configuration, Phase) {
        let sign_flips = (self.z & s.bits()).count_ones();
        let phase = Phase::from_exponent(self.y_count() + 2 * sign_flips);
        (s.flip(self.x), phase)
    }

    /// Matrix element `⟨s|P|s'⟩` with `s' = s ⊕ x`; all other columns of row
    /// `s` vanish. Equivalent to the phase of `P|s'⟩`.
    #[inline]
    pub fn matrix_element(self, s_prime: Configuration) -> Phase {
        let sign_flips = (self.z & s_prime.bits()).count_ones();
        Phase::from_exponent(self.y_count() + 2 * sign_flips)
    }

}

/// Matrix product `a * b`, returned as a phase times a string.
///
/// With the `i^{|y|}` encoding the product phase is
/// `i^{|y_a| + |y_b| − |y_ab|} · (−1)^{popcount(z_a & x_b)}`.
impl std::ops::Mul for PauliString {
    type Output = (Phase, PauliString);

    #[inline]
    fn mul(self, other: PauliString) -> (Phase, PauliString) {
        let prod = PauliString {
            x: self.x ^ other.x,
            z: self.z ^ other.z,
        };
        let ya = self.y_count();
        let yb = other.y_count();
        let yab = prod.y_count();
        let swaps = (self.z & other.x).count_ones();
        // ya + yb − yab is in {−2,…,4}; add a multiple of 4 to keep it
        // non-negative before the modular reduction.
        let exponent = ya + yb + 8 - yab + 2 * swaps;
        (Phase::from_exponent(exponent), prod)
    }
}

// ---------------------------------------------------------------------------
// Hamiltonian
// ---------------------------------------------------------------------------

/// One group of terms sharing a flip mask `x`. `phase` caches `i^{|y|}`.
#[derive(Clone, Debug)]
struct GroupTerm<T> {
    coeff: T,
    z: u64,
    phase: Phase,
}

#[derive(Clone, Debug)]
struct FlipGroup<T> {
    x: u64,
    terms: Vec<GroupTerm<T>>,
}

/// A Hermitian operator given as a real-coefficient sum of Pauli strings,
/// merged and sorted into a canonical order.
#[derive(Clone, Debug)]
pub struct Hamiltonian<T: Scalar> {
    n_qubits: usize,
    terms: Vec<(T, PauliString)>,
    groups: Vec<FlipGroup<T>>,
}

impl<T: Scalar> Hamiltonian<T> {
    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Canonically ordered `(coefficient, string)` terms.
    #[inline]
    pub fn terms(&self) -> &[(T, PauliString)] {
        &self.terms
    }

    #[inline]
    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    /// Row `s` of the matrix: every configuration `s'` with
    /// `⟨s|H|s'⟩ ≠ 0`, together with that matrix element. Entries with
    /// magnitude below [`COEFF_TOLERANCE`] are omitted. The diagonal entry
    /// appears iff some term has `x = 0` and the signs do not cancel.
    pub fn connected(&self, s: Configuration) -> Vec<(Configuration, Complex<T>)> {
        debug_assert_eq!(s.n_qubits(), self.n_qubits);
        self.row_inner(s, |z, target| (z & target.bits()).count_ones())
    }

    /// Expansion of `H|s⟩` in the computational basis: pairs
    /// `(s', coefficient)` with `H|s⟩ = Σ coefficient · |s'⟩`.
    ///
    /// For Hermitian `H` this is the complex conjugate of
    /// [`Hamiltonian::connected`] entry by entry, but it is computed
    /// independently from the source-state signs.
    pub fn apply_to_basis(&self, s: Configuration) -> Vec<(Configuration, Complex<T>)> {
        debug_assert_eq!(s.n_qubits(), self.n_qubits);
        self.row_inner(s, |z, _target| (z & s.bits()).count_ones())
    }

    fn row_inner(
        &self,
        s: Configuration,
        sign_flips: impl Fn(u64, Configuration) -> u32,
    ) -> Vec<(Configuration, Complex<T>)> {
        let tol_sq = T::of_f64(COEFF_TOLERANCE * COEFF_TOLERANCE);
        let mut out = Vec::with_capacity(self.groups.len());
        for group in &self.groups {
            let target = s.flip(group.x);
            let mut m = Complex::new(T::zero(), T::zero());
            for term in &group.terms {
                let mut phase = term.phase;
                if sign_flips(term.z, target) % 2 == 1 {
                    phase = phase * Phase::MinusOne;
                }
                m += phase.to_complex::<T>() * term.coeff;
            }
            if m.norm_sqr() > tol_sq {
                out.push((target, m));
            }
        }
        out
    }

    /// Largest row sum `max_s Σ_{s'} |⟨s|H|s'⟩|`, an upper bound on the
    /// spectral radius. Cheap to bound without enumerating rows: the row sum
    /// is at most the sum of coefficient magnitudes.
    pub fn coefficient_norm(&self) -> T {
        let mags: Vec<T> = self.terms.iter().map(|(c, _)| c.abs()).collect();
        crate::scalar::pairwise_sum(&mags)
    }
}

// ---------------------------------------------------------------------------
// Builder
// ---------------------------------------------------------------------------

/// Accumulates Pauli terms with complex coefficients (as produced by
/// fermionic mappings), merges duplicates, and verifies that the result is
/// Hermitian — i.e. that every surviving coefficient is real.
pub struct HamiltonianBuilder<T: Scalar> {
    n_qubits: usize,
    acc: BTreeMap<PauliString, Complex<T>>,
}

impl<T: Scalar> HamiltonianBuilder<T> {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(CoreError::TooManyQubits {
                what: "Hamiltonian",
                got: n_qubits,
                max: MAX_QUBITS,
            });
        }
        Ok(Self {
            n_qubits,
            acc: BTreeMap::new(),
        })
    }

    #[inline]
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn add(&mut self, coeff: T, string: PauliString) -> &mut Self {
        self.add_complex(Complex::new(coeff, T::zero()), string)
    }

    pub fn add_complex(&mut self, coeff: Complex<T>, string: PauliString) -> &mut Self {
        debug_assert!(
            self.n_qubits == 64 || (string.x | string.z) >> self.n_qubits == 0,
            "string acts outside the qubit register"
        );
        let entry = self
            .acc
            .entry(string)
            .or_insert_with(|| Complex::new(T::zero(), T::zero()));
        *entry += coeff;
        self
    }

    /// Merge, drop negligible terms, check Hermiticity, and group by flip
    /// mask.
    pub fn finish(self) -> Result<Hamiltonian<T>> {
        let tol = T::of_f64(COEFF_TOLERANCE);
        let mut terms: Vec<(T, PauliString)> = Vec::with_capacity(self.acc.len());
        for (string, coeff) in self.acc {
            if coeff.re.abs() <= tol && coeff.im.abs() <= tol {
                continue;
            }
            if coeff.im.abs() > T::of_f64(1e-10) * coeff.re.abs().max(T::one()) {
                return Err(CoreError::NonHermitian(format!(
                    "term {} has imaginary coefficient {:e}",
                    string.letters(self.n_qubits),
                    coeff.im.to_f64(),
                )));
            }
            terms.push((coeff.re, string));
        }

        // BTreeMap iteration is already (x, z)-sorted; group consecutive
        // equal flip masks. Terms are sorted by (x, z) through the derived
        // PauliString ordering.
        let mut groups: Vec<FlipGroup<T>> = Vec::new();
        let mut by_x: BTreeMap<u64, Vec<GroupTerm<T>>> = BTreeMap::new();
        for &(coeff, string) in &terms {
            by_x.entry(string.x).or_default().push(GroupTerm {
                coeff,
                z: string.z,
                phase: Phase::from_exponent(string.y_count()),
            });
        }
        for (x, group_terms) in by_x {
            groups.push(FlipGroup {
                x,
                terms: group_terms,
            });
        }

        Ok(Hamiltonian {
            n_qubits: self.n_qubits,
            terms,
            groups,
        })
    }
}

/// The spin-1/2 antiferromagnetic Heisenberg chain
/// `H = J Σ_⟨i,j⟩ (X_i X_j + Y_i Y_j + Z_i Z_j)` on a line of `n` sites,
/// optionally closed into a ring. For `n = 2` the ring bond coincides with
/// the open bond, so both boundary choices give the same operator.
pub fn build_afh_chain<T: Scalar>(n: usize, coupling: T, periodic: bool) -> Result<Hamiltonian<T>> {
    if n < 2 {
        return Err(CoreError::InvalidInput(format!(
            "Heisenberg chain needs at least 2 sites, got {n}"
        )));
    }
    let mut builder = HamiltonianBuilder::new(n)?;
    let mut bonds: Vec<(usize, usize)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    if periodic && n > 2 {
        bonds.push((n - 1, 0));
    }
    for (i, j) in bonds {
        builder.add(coupling, PauliString {
            x: (1 << i) | (1 << j),
            z: 0,
        });
        builder.add(coupling, PauliString {
            x: (1 << i) | (1 << j),
            z: (1 << i) | (1 << j),
        });
        builder.add(coupling, PauliString {
            x: 0,
            z: (1 << i) | (1 << j),
        });
    }
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn single_qubit_actions() {
        let s0 = Configuration::new(0, 1);
        let s1 = Configuration::new(1, 1);

        let (t, p) = PauliString::z_on(0).apply(s0);
        assert_eq!((t, p), (s0, Phase::One));
        let (t, p) = PauliString::z_on(0).apply(s1);
        assert_eq!((t, p), (s1, Phase::MinusOne));

        let (t, p) = PauliString::x_on(0).apply(s0);
        assert_eq!((t, p), (s1, Phase::One));

        let (t, p) = PauliString::y_on(0).apply(s0);
        assert_eq!((t, p), (s1, Phase::I));
        let (t, p) = PauliString::y_on(0).apply(s1);
        assert_eq!((t, p), (s0, Phase::MinusI));
    }

    #[test]
    fn product_phase_table() {
        let x = PauliString::x_on(0);
        let y = PauliString::y_on(0);
        let z = PauliString::z_on(0);

        assert_eq!((z * x), (Phase::I, y)); // ZX = iY
        assert_eq!((x * z), (Phase::MinusI, y)); // XZ = −iY
        assert_eq!((x * y), (Phase::I, z)); // XY = iZ
        assert_eq!((y * x), (Phase::MinusI, z)); // YX = −iZ
        assert_eq!((y * z), (Phase::I, x)); // YZ = iX
        assert_eq!((z * y), (Phase::MinusI, x)); // ZY = −iX
        assert_eq!((x * x), (Phase::One, PauliString::IDENTITY));
        assert_eq!((y * y), (Phase::One, PauliString::IDENTITY));
    }

    #[test]
    fn letters_round_trip() {
        let p = PauliString::from_letters("IXYZ").unwrap();
        assert_eq!(p.x, 0b0110);
        assert_eq!(p.z, 0b1100);
        assert_eq!(p.letters(4), "IXYZ");
        assert!(PauliString::from_letters("IXQZ").is_err());
    }

    fn arb_string(n: usize) -> impl Strategy<Value = PauliString> {
        let mask = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        (0..=mask, 0..=mask).prop_map(|(x, z)| PauliString { x, z })
    }

    proptest! {
        /// mul agrees with sequential application on every basis state:
        /// (a·b)|s⟩ computed via the product string equals a(b|s⟩). Phases
        /// are exact fourth roots of unity, so equality is exact.
        #[test]
        fn product_matches_sequential_application(
            a in arb_string(6),
            b in arb_string(6),
            bits in 0u64..64,
        ) {
            let s = Configuration::new(bits, 6);
            let (phase_ab, ab) = a * b;
            let (t_direct, p_direct) = ab.apply(s);

            let (t_b, p_b) = b.apply(s);
            let (t_seq, p_a) = a.apply(t_b);

            prop_assert_eq!(t_direct, t_seq);
            prop_assert_eq!(phase_ab * p_direct, p_b * p_a);
        }

        /// Every Pauli string is Hermitian: ⟨s'|P|s⟩ = conj(⟨s|P|s'⟩).
        #[test]
        fn strings_are_hermitian(a in arb_string(6), bits in 0u64..64) {
            let s = Configuration::new(bits, 6);
            let (t, p_ts) = a.apply(s); // ⟨t|P|s⟩
            let (s_back, p_st) = a.apply(t); // ⟨s|P|t⟩
            prop_assert_eq!(s_back, s);
            let forward: Complex<f64> = p_ts.to_complex();
            let backward: Complex<f64> = p_st.to_complex();
            prop_assert_eq!(forward, backward.conj());
        }
    }

    #[test]
    fn builder_merges_and_checks_hermiticity() {
        let mut b = HamiltonianBuilder::<f64>::new(2).unwrap();
        let xx = PauliString::from_letters("XX").unwrap();
        b.add(0.5, xx);
        b.add(0.25, xx);
        b.add(-0.75, xx); // cancels to zero
        b.add(1.0, PauliString::from_letters("ZI").unwrap());
        let h = b.finish().unwrap();
        assert_eq!(h.n_terms(), 1);
        assert_eq!(h.terms()[0].1.letters(2), "ZI");

        let mut b = HamiltonianBuilder::<f64>::new(1).unwrap();
        b.add_complex(c(0.0, 0.3), PauliString::z_on(0));
        assert!(matches!(b.finish(), Err(CoreError::NonHermitian(_))));
    }

    #[test]
    fn afh_two_site_rows() {
        let h = build_afh_chain::<f64>(2, 1.0, false).unwrap();
        assert_eq!(h.n_terms(), 3);

        // Heisenberg flips only antiparallel pairs: the XX and YY
        // contributions cancel between |00⟩ and |11⟩ but add between
        // |01⟩ and |10⟩.
        let row00 = h.connected(Configuration::new(0b00, 2));
        assert_eq!(row00.len(), 1);
        assert_eq!(row00[0].0.bits(), 0b00);
        assert!((row00[0].1 - c(1.0, 0.0)).norm() < 1e-15);

        let row01 = h.connected(Configuration::new(0b01, 2));
        let as_map: BTreeMap<u64, Complex<f64>> =
            row01.iter().map(|&(s, m)| (s.bits(), m)).collect();
        assert_eq!(as_map.len(), 2);
        assert!((as_map[&0b01] - c(-1.0, 0.0)).norm() < 1e-15);
        assert!((as_map[&0b10] - c(2.0, 0.0)).norm() < 1e-15);

        // n = 2 periodic is the same operator as open.
        let hp = build_afh_chain::<f64>(2, 1.0, true).unwrap();
        assert_eq!(hp.n_terms(), 3);
        for (a, b) in h.terms().iter().zip(hp.terms()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn afh_term_counts() {
        assert_eq!(build_afh_chain::<f64>(4, 1.0, false).unwrap().n_terms(), 9);
        assert_eq!(build_afh_chain::<f64>(4, 1.0, true).unwrap().n_terms(), 12);
        assert_eq!(build_afh_chain::<f64>(7, 1.0, true).unwrap().n_terms(), 21);
    }

    #[test]
    fn apply_to_basis_conjugates_connected() {
        let h = build_afh_chain::<f64>(5, 1.0, true).unwrap();
        for s in Configuration::all(5) {
            let row: BTreeMap<u64, Complex<f64>> = h
                .connected(s)
                .into_iter()
                .map(|(t, m)| (t.bits(), m))
                .collect();
            let col: BTreeMap<u64, Complex<f64>> = h
                .apply_to_basis(s)
                .into_iter()
                .map(|(t, m)| (t.bits(), m))
                .collect();
            assert_eq!(row.len(), col.len());
            for (k, m) in &row {
                assert!((m - col[k].conj()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn configuration_display_puts_qubit_zero_first() {
        let s = Configuration::new(0b0001, 4);
        assert_eq!(s.to_string(), "1000");
        assert_eq!(s.bit(0), 1);
        assert_eq!(s.bit(3), 0);
    }
}
