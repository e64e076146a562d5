//! Floating-point scalar abstraction.
//!
//! Every numerical kernel in this crate is generic over [`Scalar`], which is
//! implemented for `f32` and `f64`. The trait extends `nalgebra::RealField`
//! (elementary functions, linear algebra) and `num_traits::Num` (so that
//! `num_complex::Complex<T>` has full arithmetic) with the handful of
//! conversions, byte-level serialization hooks, and RNG entry points the
//! solver needs.

use num_complex::Complex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Real scalar type used throughout the solver.
pub trait Scalar:
    nalgebra::RealField
    + num_traits::Num
    + Copy
    + Default
    + std::iter::Sum
    + Send
    + Sync
    + 'static
{
    /// Size of the little-endian byte encoding used in checkpoints.
    const BYTES: usize;

    fn of_f64(x: f64) -> Self;
    fn of_usize(n: usize) -> Self;
    fn to_f64(self) -> f64;
    fn is_finite_scalar(self) -> bool;
    fn neg_infinity() -> Self;

    /// True for finite values strictly greater than zero; NaN and
    /// infinities fail, which is what validation guards want.
    #[inline]
    fn is_positive_finite(self) -> bool {
        self.is_finite_scalar() && self > Self::zero()
    }

    /// Append the little-endian byte encoding to `out`.
    fn write_le(self, out: &mut Vec<u8>);
    /// Decode from exactly [`Scalar::BYTES`] bytes.
    fn read_le(bytes: &[u8]) -> Self;

    /// One draw from the standard normal distribution.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;
    /// One draw from the uniform distribution on `[lo, hi)`.
    fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self;
}

impl Scalar for f64 {
    const BYTES: usize = 8;

    #[inline]
    fn of_f64(x: f64) -> Self {
        x
    }
    #[inline]
    fn of_usize(n: usize) -> Self {
        n as f64
    }
    #[inline]
    fn to_f64(self) -> f64 {
        self
    }
    #[inline]
    fn is_finite_scalar(self) -> bool {
        self.is_finite()
    }
    #[inline]
    fn neg_infinity() -> Self {
        f64::NEG_INFINITY
    }

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes.try_into().expect("need exactly 8 bytes"))
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
    fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self {
        rng.gen_range(lo..hi)
    }
}

impl Scalar for f32 {
    const BYTES: usize = 4;

    #[inline]
    fn of_f64(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn of_usize(n: usize) -> Self {
        n as f32
    }
    #[inline]
    fn to_f64(self) -> f64 {
        f64::from(self)
    }
    #[inline]
    fn is_finite_scalar(self) -> bool {
        self.is_finite()
    }
    #[inline]
    fn neg_infinity() -> Self {
        f32::NEG_INFINITY
    }

    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes.try_into().expect("need exactly 4 bytes"))
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
    fn uniform<R: Rng + ?Sized>(rng: &mut R, lo: Self, hi: Self) -> Self {
        rng.gen_range(lo..hi)
    }
}

/// `exp(z)` for complex `z`, written out in terms of real elementary
/// functions so it works for any [`Scalar`].
#[inline]
pub fn cexp<T: Scalar>(z: Complex<T>) -> Complex<T> {
    let m = z.re.exp();
    Complex::new(m * z.im.cos(), m * z.im.sin())
}

/// `|z|` without the intermediate overflow guard of `Complex::norm`
/// (magnitudes here are O(1); speed and genericity matter more).
#[inline]
pub fn cabs<T: Scalar>(z: Complex<T>) -> T {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Pairwise (cascade) summation.
///
/// Deterministic for a fixed input order and far more accurate than a
/// running sum on long Monte Carlo reductions. Works for any additive
/// element, in particular `T` and `Complex<T>`.
pub fn pairwise_sum<A>(xs: &[A]) -> A
where
    A: Copy + num_traits::Zero + std::ops::Add<Output = A>,
{
    const SEQ_THRESHOLD: usize = 32;
    match xs.len() {
        0 => A::zero(),
        n if n <= SEQ_THRESHOLD => {
            let mut acc = A::zero();
            for &x in xs {
                acc = acc + x;
            }
            acc
        }
        n => {
            let (lo, hi) = xs.split_at(n / 2);
            pairwise_sum(lo) + pairwise_sum(hi)
        }
    }
}
