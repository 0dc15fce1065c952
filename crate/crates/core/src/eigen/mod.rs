//! Hecke eigenvalue seeds and the four-term recurrence.
//!
//! A seed `(λ(p), λ(p²), 1/p)` determines every `λ(pⁿ)` through
//!
//! ```text
//! λ(pⁿ) = λ(p)λ(pⁿ⁻¹) − c·λ(pⁿ⁻²) + λ(p)λ(pⁿ⁻³) − λ(pⁿ⁻⁴),   n ≥ 3,
//! c     = λ(p)² − λ(p²) − 1/p,
//! ```
//!
//! with terms of negative exponent read as zero. Equivalently the sequence is
//! the coefficient list of `(1 − T²/p) / (1 − aT + cT² − aT³ + T⁴)`.

mod normalize;
mod table;

pub use normalize::{
    denormalize, normalize, read_raw_records, IngestedSystem, NormalizedRecord, RawEigenRecord,
    RecordMismatch,
};
pub use table::{extend_multiplicative, EigenSystem, EigenTable, Provenance};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::primes::is_prime;
use crate::scalar::{GradedRational, Scalar};

/// The triple `(λ(p), λ(p²), p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeckeSeed<S> {
    p: u64,
    lam_p: S,
    lam_p2: S,
}

/// A seed in the exact graded arithmetic.
pub type ExactSeed = HeckeSeed<GradedRational>;

/// Scalars that carry a grading need a compatibility check at construction.
pub trait SeedScalar: Scalar {
    /// Whether `self` can serve as `λ(p)` for the prime `p`.
    fn fits_prime(&self, _p: u64) -> bool {
        true
    }
    /// Whether `self` lies in the even (rational) component.
    fn is_even(&self) -> bool {
        true
    }
    /// `c = λ(p)² − λ(p²) − 1/p` as `hi + lo`. Exact arithmetics have no
    /// remainder; binary64 returns the rounding error of `hi` so the
    /// recurrence can keep it.
    fn spin_c_split(lam_p: &Self, lam_p2: &Self, p: u64) -> (Self, Option<Self>) {
        let c = lam_p.clone() * lam_p.clone() - lam_p2.clone() - Self::from_ratio(1, p as i64);
        (c, None)
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

impl SeedScalar for f64 {
    fn spin_c_split(lam_p: &f64, lam_p2: &f64, p: u64) -> (f64, Option<f64>) {
        let p = p as f64;
        let inv = 1.0 / p;
        let inv_lo = (-inv).mul_add(p, 1.0) / p;
        let sq = lam_p * lam_p;
        let sq_lo = lam_p.mul_add(*lam_p, -sq);
        let (s1, e1) = two_sum(sq, -lam_p2);
        let (s2, e2) = two_sum(s1, -inv);
        let (hi, lo) = two_sum(s2, sq_lo + e1 + e2 - inv_lo);
        (hi, Some(lo))
    }
}
impl SeedScalar for num_rational::BigRational {}

impl SeedScalar for GradedRational {
    fn fits_prime(&self, p: u64) -> bool {
        self.is_zero() || self.radicand() == 1 || self.radicand() == p
    }
    fn is_even(&self) -> bool {
        self.is_zero() || self.radicand() == 1
    }
}

impl<S: SeedScalar> HeckeSeed<S> {
    /// A free-mode seed: any values, subject only to `p` prime and the grading.
    pub fn new(p: u64, lam_p: S, lam_p2: S) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if !lam_p.fits_prime(p) || !lam_p2.is_even() {
            return Err(Error::OutOfRange(format!(
                "seed values {lam_p:?}, {lam_p2:?} are not graded at p={p}"
            )));
        }
        Ok(Self { p, lam_p, lam_p2 })
    }

    /// A seed that must also satisfy the unit-circle Satake constraints.
    pub fn satake(p: u64, lam_p: S, lam_p2: S, tol: f64) -> Result<Self> {
        let seed = Self::new(p, lam_p, lam_p2)?;
        seed.check_satake(tol)?;
        Ok(seed)
    }

    /// Re-runs construction checks, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.p, self.lam_p.clone(), self.lam_p2.clone()).map(|_| ())
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn lam_p(&self) -> &S {
        &self.lam_p
    }

    pub fn lam_p2(&self) -> &S {
        &self.lam_p2
    }

    pub fn inv_p(&self) -> S {
        S::from_ratio(1, self.p as i64)
    }

    /// `c = λ(p)² − λ(p²) − 1/p`, the middle coefficient of the spin polynomial.
    pub fn spin_c(&self) -> S {
        self.lam_p.clone() * self.lam_p.clone() - self.lam_p2.clone() - self.inv_p()
    }

    pub fn to_float(&self) -> HeckeSeed<f64> {
        HeckeSeed {
            p: self.p,
            lam_p: self.lam_p.to_f64(),
            lam_p2: self.lam_p2.to_f64(),
        }
    }

    /// The traces `u ≥ v` of the two unitary pairs `{e^{±iθ}}`, when they exist.
    ///
    /// The spin polynomial factors as `(1 − uT + T²)(1 − vT + T²)` with
    /// `u + v = λ(p)` and `uv = c − 2`; the seed is Satake-realizable exactly
    /// when both traces are real and lie in `[−2, 2]`.
    pub fn satake_traces(&self, tol: f64) -> Option<(f64, f64)> {
        let a = self.lam_p.to_f64();
        let c = self.spin_c().to_f64();
        // both roots of z² − az + (c − 2) in [−2, 2]: real, vertex inside,
        // nonnegative at the endpoints
        let disc = a * a - 4.0 * (c - 2.0);
        let at_plus = 2.0 - 2.0 * a + c;
        let at_minus = 2.0 + 2.0 * a + c;
        if disc < -tol || a.abs() > 4.0 + tol || at_plus < -tol || at_minus < -tol {
            return None;
        }
        // a discriminant at rounding level is a double root; its square root
        // would otherwise inflate the error to ~1e-8
        let noise = 64.0 * f64::EPSILON * (1.0 + a * a + c.abs());
        let root = if disc <= noise { 0.0 } else { disc.sqrt() };
        let u = (a + root) / 2.0;
        let v = (a - root) / 2.0;
        Some((u.clamp(-2.0, 2.0), v.clamp(-2.0, 2.0)))
    }

    pub fn check_satake(&self, tol: f64) -> Result<()> {
        let a = self.lam_p.to_f64();
        let c = self.spin_c().to_f64();
        if a.abs() > 4.0 + tol {
            return Err(Error::NotSatake {
                p: self.p,
                reason: format!("|λ(p)| = {} exceeds 4", a.abs()),
            });
        }
        if !(-2.0 - tol..=6.0 + tol).contains(&c) {
            return Err(Error::NotSatake {
                p: self.p,
                reason: format!("spin coefficient {c} outside [-2, 6]"),
            });
        }
        if self.satake_traces(tol).is_none() {
            return Err(Error::NotSatake {
                p: self.p,
                reason: "spin polynomial has roots off the unit circle".into(),
            });
        }
        Ok(())
    }

    /// Satake angles `(θ₁, θ₂)` in `[0, π]`.
    pub fn satake_pair(&self, tol: f64) -> Result<SatakePair> {
        self.check_satake(tol)?;
        let (u, v) = self.satake_traces(tol).expect("checked above");
        Ok(SatakePair {
            theta1: (u / 2.0).clamp(-1.0, 1.0).acos(),
            theta2: (v / 2.0).clamp(-1.0, 1.0).acos(),
        })
    }
}

/// Spin polynomial coefficients `[1, −a, c, −a, 1]`, constant term first.
pub fn spin_poly<S: SeedScalar>(seed: &HeckeSeed<S>) -> [S; 5] {
    let a = seed.lam_p.clone();
    [S::one(), -a.clone(), seed.spin_c(), -a, S::one()]
}

/// `λ(p⁰), λ(p¹), …` by the four-term recurrence, without a bound.
#[derive(Clone, Debug)]
pub struct PrimePowers<S> {
    a: S,
    c: S,
    c_lo: Option<S>,
    lam_p2: S,
    /// The last four values, oldest first.
    window: [S; 4],
    n: usize,
}

impl<S: SeedScalar> PrimePowers<S> {
    pub fn new(seed: &HeckeSeed<S>) -> Self {
        let (c, c_lo) = S::spin_c_split(&seed.lam_p, &seed.lam_p2, seed.p);
        Self {
            a: seed.lam_p.clone(),
            c,
            c_lo,
            lam_p2: seed.lam_p2.clone(),
            window: [S::zero(), S::zero(), S::zero(), S::zero()],
            n: 0,
        }
    }
}

impl<S: SeedScalar> Iterator for PrimePowers<S> {
    type Item = S;

    fn next(&mut self) -> Option<S> {
        let [w4, w3, w2, w1] = &self.window;
        let next = match self.n {
            0 => S::one(),
            1 => self.a.clone(),
            2 => self.lam_p2.clone(),
            _ => {
                let next = self.a.clone() * w1.clone() - self.c.clone() * w2.clone()
                    + self.a.clone() * w3.clone()
                    - w4.clone();
                match &self.c_lo {
                    Some(lo) => next - lo.clone() * w2.clone(),
                    None => next,
                }
            }
        };
        self.window.rotate_left(1);
        self.window[3] = next.clone();
        self.n += 1;
        Some(next)
    }
}

/// `λ(p⁰), …, λ(p^max_n)` by the four-term recurrence.
pub fn prime_power_values<S: SeedScalar>(seed: &HeckeSeed<S>, max_n: usize) -> Vec<S> {
    PrimePowers::new(seed).take(max_n + 1).collect()
}

/// `λ(pⁿ)`.
pub fn lambda_prime_power<S: SeedScalar>(seed: &HeckeSeed<S>, n: usize) -> S {
    prime_power_values(seed, n).pop().expect("nonempty")
}

/// Satake angles `θ₁, θ₂ ∈ [0, π]`; the parameters are `{e^{±iθ₁}, e^{±iθ₂}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SatakePair {
    pub theta1: f64,
    pub theta2: f64,
}

impl SatakePair {
    pub fn new(theta1: f64, theta2: f64) -> Result<Self> {
        for t in [theta1, theta2] {
            if !(0.0..=PI).contains(&t) {
                return Err(Error::OutOfRange(format!("Satake angle {t} outside [0, π]")));
            }
        }
        Ok(Self { theta1, theta2 })
    }

    pub fn u(&self) -> f64 {
        2.0 * self.theta1.cos()
    }

    pub fn v(&self) -> f64 {
        2.0 * self.theta2.cos()
    }

    /// The four Satake parameters `e^{iθ₁}, e^{−iθ₁}, e^{iθ₂}, e^{−iθ₂}`.
    pub fn parameters(&self) -> [Complex64; 4] {
        [
            Complex64::from_polar(1.0, self.theta1),
            Complex64::from_polar(1.0, -self.theta1),
            Complex64::from_polar(1.0, self.theta2),
            Complex64::from_polar(1.0, -self.theta2),
        ]
    }
}

/// The seed whose local spin factor has Satake parameters `sp` at `p`.
pub fn satake_to_seed(sp: &SatakePair, p: u64) -> Result<HeckeSeed<f64>> {
    seed_from_traces(sp.u(), sp.v(), p)
}

/// `λ(p) = u + v` and `λ(p²) = (u + v)² − (2 + uv) − 1/p` for traces `u, v`.
///
/// With exact `u, v` (e.g. rationals in `[−2, 2]`) this produces exact
/// Satake-realizable seeds.
pub fn seed_from_traces<S: SeedScalar>(u: S, v: S, p: u64) -> Result<HeckeSeed<S>> {
    let a = u.clone() + v.clone();
    let e2 = S::from_ratio(2, 1) + u * v;
    let b = a.clone() * a.clone() - e2 - S::from_ratio(1, p as i64);
    HeckeSeed::new(p, a, b)
}
