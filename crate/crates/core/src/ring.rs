//! Exact arithmetic in the ring ℤ[ω, 1/√2] with ω = e^{iπ/4}.
//!
//! An [`ExactScalar`] is stored as `(a0 + a1·ω + a2·ω² + a3·ω³) / √2^k` with
//! arbitrary-precision integer coefficients. Values are kept in a canonical
//! form where `k` is minimal, so equality is field-wise equality.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse exact scalar from {0:?}, expected ((a0,a1,a2,a3),k)")]
    Parse(String),
}

/// An element of ℤ[ω, 1/√2].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    coeffs: [BigInt; 4],
    k: u32,
}

/// Coefficients of √2 = ω − ω³.
fn sqrt2_coeffs() -> [BigInt; 4] {
    [BigInt::zero(), BigInt::one(), BigInt::zero(), -BigInt::one()]
}

/// Product in ℤ[ω] (cyclic convolution, ω⁴ = −1).
fn raw_mul(a: &[BigInt; 4], b: &[BigInt; 4]) -> [BigInt; 4] {
    let mut out: [BigInt; 4] = Default::default();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if bj.is_zero() {
                continue;
            }
            let p = ai * bj;
            if i + j >= 4 {
                out[i + j - 4] -= p;
            } else {
                out[i + j] += p;
            }
        }
    }
    out
}

fn raw_add(a: &[BigInt; 4], b: &[BigInt; 4]) -> [BigInt; 4] {
    [&a[0] + &b[0], &a[1] + &b[1], &a[2] + &b[2], &a[3] + &b[3]]
}

/// Image of a ℤ[ω] element under the Galois automorphism ω ↦ ω^j (j odd).
fn galois(a: &[BigInt; 4], j: usize) -> [BigInt; 4] {
    let mut out: [BigInt; 4] = Default::default();
    for (i, ai) in a.iter().enumerate() {
        let e = (i * j) % 8;
        if e >= 4 {
            out[e - 4] -= ai;
        } else {
            out[e] += ai;
        }
    }
    out
}

impl ExactScalar {
    pub fn new(coeffs: [i64; 4], k: u32) -> Self {
        Self::from_big(coeffs.map(BigInt::from), k)
    }

    pub fn from_big(coeffs: [BigInt; 4], k: u32) -> Self {
        let mut s = ExactScalar { coeffs, k };
        s.canonicalize();
        s
    }

    pub fn zero() -> Self {
        Self::new([0, 0, 0, 0], 0)
    }

    pub fn one() -> Self {
        Self::new([1, 0, 0, 0], 0)
    }

    pub fn from_int(n: i64) -> Self {
        Self::new([n, 0, 0, 0], 0)
    }

    /// The imaginary unit i = ω².
    pub fn i() -> Self {
        Self::new([0, 0, 1, 0], 0)
    }

    /// ω^j for any integer j.
    pub fn omega_pow(j: i64) -> Self {
        let e = j.rem_euclid(8) as usize;
        let mut c = [0i64; 4];
        if e >= 4 {
            c[e - 4] = -1;
        } else {
            c[e] = 1;
        }
        Self::new(c, 0)
    }

    pub fn sqrt2() -> Self {
        Self::new([0, 1, 0, -1], 0)
    }

    /// (√2)^p for any integer p.
    pub fn sqrt2_pow(p: i32) -> Self {
        if p >= 0 {
            let mut c = [BigInt::one(), BigInt::zero(), BigInt::zero(), BigInt::zero()];
            for _ in 0..p {
                c = raw_mul(&c, &sqrt2_coeffs());
            }
            Self::from_big(c, 0)
        } else {
            Self::new([1, 0, 0, 0], p.unsigned_abs())
        }
    }

    pub fn coeffs(&self) -> &[BigInt; 4] {
        &self.coeffs
    }

    /// Exponent of the √2 denominator.
    pub fn sqrt2_exponent(&self) -> u32 {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn canonicalize(&mut self) {
        if self.is_zero() {
            self.k = 0;
            return;
        }
        // x / √2 stays integral iff every coefficient of x·√2 is even.
        while self.k > 0 {
            let t = raw_mul(&self.coeffs, &sqrt2_coeffs());
            if t.iter().all(|c| c.is_even()) {
                self.coeffs = t.map(|c| c / 2);
                self.k -= 1;
            } else {
                break;
            }
        }
    }

    /// Coefficients rewritten over a denominator √2^k with k ≥ self.k.
    fn coeffs_at(&self, k: u32) -> [BigInt; 4] {
        let mut c = self.coeffs.clone();
        for _ in self.k..k {
            c = raw_mul(&c, &sqrt2_coeffs());
        }
        c
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.k.max(other.k);
        Self::from_big(raw_add(&self.coeffs_at(k), &other.coeffs_at(k)), k)
    }

    pub fn neg(&self) -> Self {
        ExactScalar {
            coeffs: self.coeffs.clone().map(|c| -c),
            k: self.k,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self::from_big(raw_mul(&self.coeffs, &other.coeffs), self.k + other.k)
    }

    /// Complex conjugate: ω̄ = −ω³.
    pub fn conj(&self) -> Self {
        let [a0, a1, a2, a3] = &self.coeffs;
        ExactScalar {
            coeffs: [a0.clone(), -a3, -a2, -a1],
            k: self.k,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let w = [
            Complex64::new(1.0, 0.0),
            Complex64::new(h, h),
            Complex64::new(0.0, 1.0),
            Complex64::new(-h, h),
        ];
        let mut z = Complex64::new(0.0, 0.0);
        for (c, wj) in self.coeffs.iter().zip(w) {
            z += wj * c.to_f64().unwrap_or(f64::NAN);
        }
        z * std::f64::consts::SQRT_2.powi(-(self.k as i32))
    }

    /// Returns `Some(j)` when the value is exactly ω^j (0 ≤ j < 8).
    pub fn as_omega_power(&self) -> Option<i64> {
        if self.k != 0 {
            return None;
        }
        let nz: Vec<usize> = (0..4).filter(|&i| !self.coeffs[i].is_zero()).collect();
        if nz.len() != 1 {
            return None;
        }
        let i = nz[0];
        let c = &self.coeffs[i];
        if c.is_one() {
            Some(i as i64)
        } else if (-c).is_one() {
            Some(i as i64 + 4)
        } else {
            None
        }
    }

    /// Exact division: returns `q` with `q·den = self` when the quotient lies
    /// in ℤ[ω, 1/√2], and `None` otherwise.
    ///
    /// The quotient is formed in ℚ(ω) through the norm of the denominator;
    /// it is a ring element iff the odd part of that norm divides every
    /// coefficient of the numerator.
    pub fn divide_exact(&self, den: &Self) -> Result<Option<Self>, RingError> {
        if den.is_zero() {
            return Err(RingError::DivisionByZero);
        }
        // self / den = self · √2^{k_d} · σ3(D)σ5(D)σ7(D) / N(D)
        let d = &den.coeffs;
        let cofactor = raw_mul(&raw_mul(&galois(d, 3), &galois(d, 5)), &galois(d, 7));
        let norm_vec = raw_mul(d, &cofactor);
        debug_assert!(norm_vec[1..].iter().all(Zero::is_zero));
        let norm = norm_vec[0].clone();

        let numer = self
            .mul(&Self::sqrt2_pow(den.k as i32))
            .mul(&Self::from_big(cofactor, 0));

        let mut m = norm.abs();
        let mut twos = 0u32;
        while m.is_even() {
            m /= 2;
            twos += 1;
        }
        if numer.coeffs.iter().any(|c| !c.is_multiple_of(&m)) {
            return Ok(None);
        }
        let sign = if norm.is_negative() { -BigInt::one() } else { BigInt::one() };
        let coeffs = numer.coeffs.clone().map(|c| c / &m * &sign);
        Ok(Some(Self::from_big(coeffs, numer.k + 2 * twos)))
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a0, a1, a2, a3] = &self.coeffs;
        write!(f, "(({a0},{a1},{a2},{a3}),{})", self.k)
    }
}

impl FromStr for ExactScalar {
    type Err = RingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || RingError::Parse(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let inner = t
            .strip_prefix("((")
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(err)?;
        let (coeffs, k) = inner.split_once("),").ok_or_else(err)?;
        let parts: Vec<BigInt> = coeffs
            .split(',')
            .map(|p| p.parse::<BigInt>().map_err(|_| err()))
            .collect::<Result<_, _>>()?;
        let parts: [BigInt; 4] = parts.try_into().map_err(|_| err())?;
        let k = k.parse::<u32>().map_err(|_| err())?;
        Ok(Self::from_big(parts, k))
    }
}

/// Scalar backends for tensors: exact ring elements or double-precision
/// complex numbers.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_complex(&self) -> Complex64;
    fn from_exact(x: &ExactScalar) -> Self;
    /// `None` when the value has no representation in this backend.
    fn from_complex(z: Complex64) -> Option<Self>;
    /// Exact backends compare exactly and ignore `tol`.
    fn close(&self, other: &Self, tol: f64) -> bool;
}

impl Scalar for ExactScalar {
    const EXACT: bool = true;

    fn zero() -> Self {
        ExactScalar::zero()
    }
    fn one() -> Self {
        ExactScalar::one()
    }
    fn add(&self, other: &Self) -> Self {
        ExactScalar::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        ExactScalar::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        ExactScalar::mul(self, other)
    }
    fn neg(&self) -> Self {
        ExactScalar::neg(self)
    }
    fn conj(&self) -> Self {
        ExactScalar::conj(self)
    }
    fn is_zero(&self) -> bool {
        ExactScalar::is_zero(self)
    }
    fn to_complex(&self) -> Complex64 {
        ExactScalar::to_complex(self)
    }
    fn from_exact(x: &ExactScalar) -> Self {
        x.clone()
    }
    fn from_complex(_: Complex64) -> Option<Self> {
        None
    }
    fn close(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn conj(&self) -> Self {
        Complex64::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn to_complex(&self) -> Complex64 {
        *self
    }
    fn from_exact(x: &ExactScalar) -> Self {
        x.to_complex()
    }
    fn from_complex(z: Complex64) -> Option<Self> {
        Some(z)
    }
    fn close(&self, other: &Self, tol: f64) -> bool {
        (self - other).norm() <= tol
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w() -> ExactScalar {
        ExactScalar::omega_pow(1)
    }

    #[test]
    fn omega_times_omega_cubed_is_minus_one() {
        assert_eq!(w().mul(&ExactScalar::omega_pow(3)), ExactScalar::from_int(-1));
    }

    #[test]
    fn one_plus_i_over_sqrt2_is_omega() {
        let s = ExactScalar::new([1, 0, 1, 0], 1);
        assert_eq!(s.coeffs(), w().coeffs());
        assert_eq!(s.sqrt2_exponent(), 0);
    }

    #[test]
    fn conj_omega() {
        assert_eq!(w().conj(), ExactScalar::omega_pow(3).neg());
        let z = w().conj().to_complex();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((z - Complex64::new(h, -h)).norm() < 1e-15);
    }

    #[test]
    fn embedding_values() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((w().to_complex() - Complex64::new(h, h)).norm() < 1e-15);
        let s = ExactScalar::new([1, 0, 2, 0], 0);
        assert!((s.to_complex() - Complex64::new(1.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn canonical_sqrt2() {
        // 2/√2 = √2
        assert_eq!(ExactScalar::new([2, 0, 0, 0], 1), ExactScalar::sqrt2());
        // √2/√2 = 1
        assert_eq!(ExactScalar::new([0, 1, 0, -1], 1), ExactScalar::one());
        assert_eq!(ExactScalar::new([0, 0, 0, 0], 5).sqrt2_exponent(), 0);
        assert_eq!(ExactScalar::sqrt2_pow(-3).mul(&ExactScalar::sqrt2_pow(3)), ExactScalar::one());
    }

    #[test]
    fn divide_cases() {
        let a = ExactScalar::new([1, 0, 2, 0], 0);
        let b = ExactScalar::new([1, 0, -2, 0], 0);
        assert_eq!(a.divide_exact(&b).unwrap(), None);
        assert_eq!(
            ExactScalar::omega_pow(3).divide_exact(&w()).unwrap(),
            Some(ExactScalar::i())
        );
        assert_eq!(
            ExactScalar::one().divide_exact(&ExactScalar::sqrt2()).unwrap(),
            Some(ExactScalar::new([1, 0, 0, 0], 1))
        );
        // (1+i)/(1−i) = i
        let p = ExactScalar::new([1, 0, 1, 0], 0);
        let q = ExactScalar::new([1, 0, -1, 0], 0);
        assert_eq!(p.divide_exact(&q).unwrap(), Some(ExactScalar::i()));
        assert_eq!(p.divide_exact(&ExactScalar::zero()), Err(RingError::DivisionByZero));
        // 1/3 is not a ring element, 1/2 is.
        assert_eq!(ExactScalar::one().divide_exact(&ExactScalar::from_int(3)).unwrap(), None);
        assert_eq!(
            ExactScalar::one().divide_exact(&ExactScalar::from_int(-2)).unwrap(),
            Some(ExactScalar::new([-1, 0, 0, 0], 2))
        );
    }

    #[test]
    fn text_form_round_trip() {
        let s = ExactScalar::new([3, -1, 0, 7], 3);
        let t = s.to_string();
        assert_eq!(t.parse::<ExactScalar>().unwrap(), s);
        assert!("((1,2,3),0)".parse::<ExactScalar>().is_err());
    }

    fn arb() -> impl Strategy<Value = ExactScalar> {
        (prop::array::uniform4(-20i64..20), 0u32..5).prop_map(|(c, k)| ExactScalar::new(c, k))
    }

    proptest! {
        #[test]
        fn ring_ops_match_complex(a in arb(), b in arb(), c in arb()) {
            let (za, zb) = (a.to_complex(), b.to_complex());
            prop_assert!((a.add(&b).to_complex() - (za + zb)).norm() < 1e-10);
            prop_assert!((a.mul(&b).to_complex() - za * zb).norm() < 1e-10);
            prop_assert!((a.conj().to_complex() - za.conj()).norm() < 1e-10);
            prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
            prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
            prop_assert_eq!(a.mul(&b).conj(), a.conj().mul(&b.conj()));
            prop_assert_eq!(a.add(&b).conj(), a.conj().add(&b.conj()));
            prop_assert_eq!(a.conj().conj(), a.clone());
        }

        #[test]
        fn divide_recovers_factor(a in arb(), b in arb()) {
            prop_assume!(!b.is_zero());
            prop_assert_eq!(a.mul(&b).divide_exact(&b).unwrap(), Some(a));
        }
    }
}
