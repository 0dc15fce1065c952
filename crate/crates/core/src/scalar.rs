//! Coefficient types shared by every module.
//!
//! [`Scalar`] abstracts over the four arithmetics the crate runs in: binary64
//! for bulk simulation, complex binary64 for root products of Satake
//! parameters, arbitrary-precision rationals, and [`GradedRational`], the
//! exact home of normalized eigenvalues.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Default zero tolerance for float arithmetic.
pub const FLOAT_ZERO_TOL: f64 = 1e-9;

/// Arithmetic used by recurrences, series and Dirichlet convolutions.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// True for the tolerance-free arithmetics.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &BigRational) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()))
    }

    /// Zero test; exact arithmetics ignore `tol`.
    fn is_zero_within(&self, tol: f64) -> bool;

    /// Equality used when merging repeated roots.
    fn close_to(&self, other: &Self, tol: f64) -> bool;

    /// Absolute value projected to binary64.
    fn magnitude(&self) -> f64;

    /// Real projection (the real part for complex values).
    fn to_f64(&self) -> f64;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(q: &BigRational) -> Self {
        ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn is_zero_within(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self - other).abs() <= tol
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn to_f64(&self) -> f64 {
        *self
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
    fn from_rational(q: &BigRational) -> Self {
        Complex64::new(f64::from_rational(q), 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn is_zero_within(&self, tol: f64) -> bool {
        self.norm() <= tol
    }
    fn close_to(&self, other: &Self, tol: f64) -> bool {
        (self - other).norm() <= tol
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn to_f64(&self) -> f64 {
        self.re
    }
}

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }
    fn is_zero_within(&self, _tol: f64) -> bool {
        Zero::is_zero(self)
    }
    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn magnitude(&self) -> f64 {
        ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::INFINITY)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Parity of the half-integral exponent carried by a [`GradedRational`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: u64) -> Self {
        if n % 2 == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// An exact value `q · r^(-1/2)` with `r` squarefree.
///
/// For a single prime `p` the radicand is `1` (even parity) or `p` (odd
/// parity), which is the grading that normalized eigenvalues `λ(pⁿ)` live in.
/// Products across primes stay exact because radicands multiply. Addition is
/// only defined between equal radicands; zero adopts the radicand of the
/// other summand.
#[derive(Clone)]
pub struct GradedRational {
    q: BigRational,
    rad: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("cannot add values with radicands {left} and {right}")]
pub struct GradingMismatch {
    pub left: u64,
    pub right: u64,
}

impl GradedRational {
    /// `q` for even parity, `q / sqrt(p)` for odd parity.
    pub fn new(q: BigRational, parity: Parity, p: u64) -> Self {
        match parity {
            Parity::Even => Self { q, rad: 1 },
            Parity::Odd => Self::with_radicand(q, p),
        }
    }

    pub fn rational(q: BigRational) -> Self {
        Self { q, rad: 1 }
    }

    pub fn from_ints(num: i64, den: i64) -> Self {
        Self::rational(BigRational::new(num.into(), den.into()))
    }

    /// `q / sqrt(r)` for an arbitrary positive `r`; square factors are pulled
    /// into `q`.
    pub fn with_radicand(q: BigRational, r: u64) -> Self {
        assert!(r > 0, "radicand must be positive");
        let (square_root, free) = split_square(r);
        Self {
            q: q / BigRational::from_integer(BigInt::from(square_root)),
            rad: free,
        }
    }

    pub fn q(&self) -> &BigRational {
        &self.q
    }

    pub fn radicand(&self) -> u64 {
        self.rad
    }

    /// Even when the radicand is 1.
    pub fn parity(&self) -> Parity {
        if self.rad == 1 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn is_zero(&self) -> bool {
        self.q.is_zero()
    }

    /// Sign of the value; the radical factor is positive.
    pub fn signum(&self) -> i32 {
        match self.q.cmp(&<BigRational as Zero>::zero()) {
            Ordering::Less => -1,
            Ordering::Equal => 0,
            Ordering::Greater => 1,
        }
    }

    /// The exact square, always a plain rational.
    pub fn square(&self) -> BigRational {
        &self.q * &self.q / BigRational::from_integer(BigInt::from(self.rad))
    }

    /// The value as a plain rational when the radicand is 1 or the value is 0.
    pub fn as_rational(&self) -> Option<BigRational> {
        if self.rad == 1 || self.q.is_zero() {
            Some(self.q.clone())
        } else {
            None
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, GradingMismatch> {
        if self.rad == other.rad {
            return Ok(Self {
                q: &self.q + &other.q,
                rad: self.rad,
            });
        }
        if other.q.is_zero() {
            return Ok(self.clone());
        }
        if self.q.is_zero() {
            return Ok(other.clone());
        }
        Err(GradingMismatch {
            left: self.rad,
            right: other.rad,
        })
    }

    pub fn recip(&self) -> Self {
        assert!(!self.q.is_zero(), "reciprocal of zero");
        Self {
            q: BigRational::from_integer(BigInt::from(self.rad)) / &self.q,
            rad: self.rad,
        }
    }

    fn mul_ref(&self, other: &Self) -> Self {
        let g = self.rad.gcd(&other.rad);
        let rad = (self.rad / g) * (other.rad / g);
        Self {
            q: &self.q * &other.q / BigRational::from_integer(BigInt::from(g)),
            rad,
        }
    }
}

/// Splits `r = s² · f` with `f` squarefree.
fn split_square(mut r: u64) -> (u64, u64) {
    let mut square_root = 1u64;
    let mut free = 1u64;
    let mut d = 2u64;
    while d * d <= r {
        let mut e = 0;
        while r % d == 0 {
            r /= d;
            e += 1;
        }
        square_root *= d.pow(e / 2);
        if e % 2 == 1 {
            free *= d;
        }
        d += 1;
    }
    free *= r;
    (square_root, free)
}

impl PartialEq for GradedRational {
    fn eq(&self, other: &Self) -> bool {
        if self.q.is_zero() && other.q.is_zero() {
            return true;
        }
        self.rad == other.rad && self.q == other.q
    }
}

impl Add for GradedRational {
    type Output = Self;
    fn add(self, other: Self) -> Self {
        self.checked_add(&other).expect("graded addition")
    }
}

impl Sub for GradedRational {
    type Output = Self;
    fn sub(self, other: Self) -> Self {
        self.checked_add(&-other).expect("graded subtraction")
    }
}

impl Mul for GradedRational {
    type Output = Self;
    fn mul(self, other: Self) -> Self {
        self.mul_ref(&other)
    }
}

impl Div for GradedRational {
    type Output = Self;
    fn div(self, other: Self) -> Self {
        self.mul_ref(&other.recip())
    }
}

impl Neg for GradedRational {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            q: -self.q,
            rad: self.rad,
        }
    }
}

impl Scalar for GradedRational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Self::rational(<BigRational as Zero>::zero())
    }
    fn one() -> Self {
        Self::rational(<BigRational as One>::one())
    }
    fn from_rational(q: &BigRational) -> Self {
        Self::rational(q.clone())
    }
    fn is_zero_within(&self, _tol: f64) -> bool {
        self.q.is_zero()
    }
    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }
    fn magnitude(&self) -> f64 {
        Scalar::to_f64(self).abs()
    }
    fn to_f64(&self) -> f64 {
        let q = ToPrimitive::to_f64(&self.q).unwrap_or(f64::NAN);
        if self.rad == 1 {
            q
        } else {
            q / (self.rad as f64).sqrt()
        }
    }
}

impl fmt::Debug for GradedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `num/den`, followed by `·r^-1/2` when the radicand is not 1.
impl fmt::Display for GradedRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.q.numer(), self.q.denom())?;
        if self.rad != 1 {
            write!(f, "·{}^-1/2", self.rad)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("malformed graded rational {0:?}")]
pub struct ParseGradedError(pub String);

/// Parses a decimal rational `num/den` or integer `num`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).ok()?;
            let d = BigInt::from_str(d.trim()).ok()?;
            if d.is_zero() {
                return None;
            }
            Some(BigRational::new(n, d))
        }
        None => BigInt::from_str(s).ok().map(BigRational::from_integer),
    }
}

impl FromStr for GradedRational {
    type Err = ParseGradedError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseGradedError(s.to_string());
        let (body, rad) = match s.split_once('·') {
            Some((body, suffix)) => {
                let r = suffix
                    .trim()
                    .strip_suffix("^-1/2")
                    .ok_or_else(err)?
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| err())?;
                if r == 0 {
                    return Err(err());
                }
                (body, r)
            }
            None => (s, 1),
        };
        let q = parse_rational(body).ok_or_else(err)?;
        Ok(Self::with_radicand(q, rad))
    }
}

impl Serialize for GradedRational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GradedRational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
