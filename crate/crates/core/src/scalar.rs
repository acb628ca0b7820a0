//! Scalar fields used throughout the crate.
//!
//! Every symbolic object is generic over a [`Real`] scalar. Two
//! instantiations exist: [`Rational`] (exact, arbitrary precision) for the
//! identity suites and `f64` for anything that touches eigenvalues or
//! quadrature. Complex coefficients are `Complex<R>`.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

/// Exact rational scalar.
pub type Rational = BigRational;

/// Complex numbers over a real scalar.
pub type Cx<R> = Complex<R>;

pub trait Real: Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// True when arithmetic is exact (no rounding).
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    /// Parses a decimal literal such as `12`, `0.25` or `-3.5`.
    fn parse_decimal(s: &str) -> Option<Self>;

    fn ratio(p: i64, q: i64) -> Self {
        Self::from_i64(p) / Self::from_i64(q)
    }

    fn half() -> Self {
        Self::ratio(1, 2)
    }
}

impl Real for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        f64::from_str(s).ok()
    }
}

impl Real for BigRational {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn from_f64(v: f64) -> Self {
        <BigRational as FromPrimitive>::from_f64(v).unwrap_or_else(BigRational::zero)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse_decimal(s: &str) -> Option<Self> {
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((a, b)) => (a, b),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let numer = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        let value = BigRational::new(numer, denom);
        Some(if neg { -value } else { value })
    }
}

/// Arithmetic mode selected at runtime.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

impl FromStr for Mode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rational" => Ok(Mode::Rational),
            "float" => Ok(Mode::Float),
            other => Err(crate::Error::Config(format!("unknown mode `{other}`"))),
        }
    }
}

impl Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn cx<R: Real>(re: R, im: R) -> Cx<R> {
    Complex::new(re, im)
}

pub fn cx_real<R: Real>(re: R) -> Cx<R> {
    Complex::new(re, R::zero())
}

pub fn cx_i<R: Real>() -> Cx<R> {
    Complex::new(R::zero(), R::one())
}

pub fn cx_int<R: Real>(v: i64) -> Cx<R> {
    cx_real(R::from_i64(v))
}

pub fn cx_to_f64<R: Real>(z: &Cx<R>) -> Complex<f64> {
    Complex::new(z.re.to_f64(), z.im.to_f64())
}

pub fn cx_from_f64<R: Real>(z: Complex<f64>) -> Cx<R> {
    Complex::new(R::from_f64(z.re), R::from_f64(z.im))
}

pub fn cx_is_zero<R: Real>(z: &Cx<R>) -> bool {
    z.re.is_zero() && z.im.is_zero()
}

/// Max of |re|, |im| as `f64`.
pub fn cx_norm_inf<R: Real>(z: &Cx<R>) -> f64 {
    z.re.to_f64().abs().max(z.im.to_f64().abs())
}

/// Coefficient ring for exterior forms: complex scalars or polynomials.
pub trait Ring: Clone + Debug + PartialEq + Send + Sync {
    fn zero_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn conj(&self) -> Self;

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }
}

impl<R: Real> Ring for Cx<R> {
    fn zero_like(&self) -> Self {
        Complex::zero()
    }

    fn is_zero(&self) -> bool {
        cx_is_zero(self)
    }

    fn add(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }

    fn mul(&self, other: &Self) -> Self {
        self.clone() * other.clone()
    }

    fn neg(&self) -> Self {
        -self.clone()
    }

    fn conj(&self) -> Self {
        Complex::conj(self)
    }
}

/// Signed permutation parity helper: returns +1 or -1 for the permutation
/// that sorts `items` ascending, or `None` if an element repeats.
pub fn sort_sign<T: Ord + Clone>(items: &[T]) -> Option<i32> {
    let mut v: Vec<T> = items.to_vec();
    let mut sign = 1;
    // insertion sort counting transpositions
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && v[j - 1] == v[j] {
            return None;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some(sign)
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product::<u64>().max(1)
}

pub fn one_cx<R: Real>() -> Cx<R> {
    Complex::new(R::one(), R::zero())
}
