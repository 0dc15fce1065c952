//! Sign statistics of `λ_F(n)λ_G(n)` over sampled eigen-systems.

mod measure;

pub use measure::{SamplingMeasure, Weight};

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{satake_to_seed, EigenSystem, EigenTable, Provenance, SatakePair};
use crate::error::{Error, Result};
use crate::primes::primes_up_to;
use crate::scalar::Scalar;

/// Draws independent Satake angles at every prime, one ChaCha stream per prime.
pub fn sample_system(measure: &SamplingMeasure, primes: &[u64], seed: u64) -> Result<EigenSystem<f64>> {
    if primes.is_empty() {
        return Err(Error::OutOfRange("no primes to sample".into()));
    }
    let seeds = primes
        .par_iter()
        .map(|&p| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(p);
            satake_to_seed(&measure.sample(&mut rng), p)
        })
        .collect::<Result<Vec<_>>>()?;
    EigenSystem::new(seeds, Provenance::SatakeSampled)
}

/// The angles behind [`sample_system`], for inspection.
pub fn sample_angles(measure: &SamplingMeasure, p: u64, seed: u64) -> SatakePair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(p);
    measure.sample(&mut rng)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCensus {
    pub x: usize,
    pub pos: u64,
    pub neg: u64,
    pub zero: u64,
}

impl SignCensus {
    /// `pos / (pos + neg)`, or `None` when every term vanishes.
    pub fn positive_fraction(&self) -> Option<f64> {
        let nz = self.pos + self.neg;
        (nz > 0).then(|| self.pos as f64 / nz as f64)
    }

    pub fn merge(&mut self, other: &SignCensus) {
        self.x += other.x;
        self.pos += other.pos;
        self.neg += other.neg;
        self.zero += other.zero;
    }
}

fn sign_of<S: Scalar>(v: &S, tol: f64) -> i32 {
    if v.is_zero_within(tol) {
        0
    } else if v.to_f64() > 0.0 {
        1
    } else {
        -1
    }
}

fn check_cutoff<S>(t: &EigenTable<S>, x: usize) -> Result<()> {
    if t.cutoff() < x {
        return Err(Error::CutoffTooSmall { have: t.cutoff(), need: x });
    }
    Ok(())
}

/// Signs of `λ_F(n)λ_G(n)` for `n ≤ x`. A term is zero when either factor
/// is zero (within `tol` for floats); otherwise its sign is the product of
/// the factor signs, so tiny products never underflow into the zero bin.
pub fn sign_census<S: Scalar>(tf: &EigenTable<S>, tg: &EigenTable<S>, x: usize, tol: f64) -> Result<SignCensus> {
    check_cutoff(tf, x)?;
    check_cutoff(tg, x)?;
    let mut c = SignCensus { x, ..Default::default() };
    for (a, b) in tf.values()[..x].iter().zip(&tg.values()[..x]) {
        match sign_of(a, tol) * sign_of(b, tol) {
            0 => c.zero += 1,
            1 => c.pos += 1,
            _ => c.neg += 1,
        }
    }
    Ok(c)
}

/// `h` on the powers of one prime: `h(p^j) = known[j − 1]` for
/// `j ≤ known.len()`, then `tail` (unknown when `None`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalPattern {
    pub known: Vec<bool>,
    pub tail: Option<bool>,
}

impl LocalPattern {
    pub fn constant(v: bool) -> Self {
        Self { known: Vec::new(), tail: Some(v) }
    }
}

/// A 0/1 function on prime powers: explicit patterns at finitely many
/// primes, `default` everywhere else.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HFunction {
    pub default: bool,
    pub local: BTreeMap<u64, LocalPattern>,
}

impl HFunction {
    pub fn constant(v: bool) -> Self {
        Self { default: v, local: BTreeMap::new() }
    }

    pub fn with_prime(mut self, p: u64, pattern: LocalPattern) -> Self {
        self.local.insert(p, pattern);
        self
    }

    /// The indicator of `λ_F(n)λ_G(n) ≠ 0`, read off prime powers
    /// `p^j ≤ cutoff` of both tables. Powers beyond the tables are unknown.
    pub fn nonvanishing<S: Scalar>(tf: &EigenTable<S>, tg: &EigenTable<S>, tol: f64) -> Self {
        let n = tf.cutoff().min(tg.cutoff());
        let mut local = BTreeMap::new();
        for p in primes_up_to(n as u64) {
            let mut known = Vec::new();
            let mut pj = p as usize;
            loop {
                let nz = !tf.get(pj).is_zero_within(tol) && !tg.get(pj).is_zero_within(tol);
                known.push(nz);
                match pj.checked_mul(p as usize) {
                    Some(next) if next <= n => pj = next,
                    _ => break,
                }
            }
            local.insert(p, LocalPattern { known, tail: None });
        }
        Self { default: true, local }
    }

    fn pattern(&self, p: u64) -> LocalPattern {
        self.local
            .get(&p)
            .cloned()
            .unwrap_or_else(|| LocalPattern::constant(self.default))
    }
}

/// `(1 − 1/p)(1 + Σ_j h(p^j) p^{−j})` in closed form, `tail` filling
/// every exponent past the known ones.
fn local_factor(p: u64, known: &[bool], tail: bool) -> BigRational {
    let inv = BigRational::new(1.into(), p.into());
    let one = <BigRational as One>::one();
    let mut sum = one.clone();
    let mut pw = one.clone();
    for &h in known {
        pw *= &inv;
        if h {
            sum += &pw;
        }
    }
    if tail {
        // Σ_{j > L} p^{−j} = p^{−L−1} / (1 − 1/p)
        sum += &pw * &inv / (&one - &inv);
    }
    (one - inv) * sum
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MrDensity {
    pub prime_cutoff: u64,
    pub value: f64,
    /// Bound on `|value − density|`. It covers unknown tails of local
    /// patterns and, when `h` defaults to 0, the primes above the cutoff.
    pub tail_bound: f64,
}

/// The truncated product `Π_{p≤P}(1 − 1/p)(1 + h(p)/p + h(p²)/p² + ⋯)`.
///
/// Each local factor is formed exactly; the product is accumulated in
/// binary64, so factors equal to 1 contribute no rounding at all.
pub fn mr_density(h: &HFunction, prime_cutoff: u64) -> MrDensity {
    let (lo, hi) = primes_up_to(prime_cutoff)
        .par_iter()
        .map(|&p| {
            let pat = h.pattern(p);
            let (lo, hi) = match pat.tail {
                Some(t) => {
                    let f = local_factor(p, &pat.known, t);
                    (f.clone(), f)
                }
                None => (local_factor(p, &pat.known, false), local_factor(p, &pat.known, true)),
            };
            (ToPrimitive::to_f64(&lo).unwrap_or(0.0), ToPrimitive::to_f64(&hi).unwrap_or(0.0))
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((1.0, 1.0), |(a, b), (l, u)| (a * l, b * u));
    // the unknown tails put the density in [lo, hi]; with h = 0 by default
    // the full product over all primes diverges to 0
    let lo = if h.default { lo } else { 0.0 };
    let value = if h.default { 0.5 * (lo + hi) } else { hi };
    MrDensity {
        prime_cutoff,
        value,
        tail_bound: (hi - lo).max(value - lo),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrimeSignEstimate {
    pub x: usize,
    pub primes: u64,
    /// `Σ_{p≤x} (λ_Fλ_G(p) + 16) λ_Fλ_G(p)`
    pub s_plus: f64,
    /// `Σ_{p≤x} (λ_Fλ_G(p) − 16) λ_Fλ_G(p)`
    pub s_minus: f64,
    /// `S⁺/512`, a lower bound for `pos` when every `|λ_Fλ_G(p)| ≤ 16`.
    pub pos_lower_bound: f64,
    /// `S⁻/512`, likewise for `neg`.
    pub neg_lower_bound: f64,
    pub pos: u64,
    pub neg: u64,
    pub zero: u64,
    /// `max_p |λ_Fλ_G(p)|`; the bounds above need this to be at most 16.
    pub max_abs_product: f64,
}

impl PrimeSignEstimate {
    /// Whether both counting bounds hold on this sample.
    pub fn bounds_hold(&self) -> bool {
        self.pos as f64 >= self.pos_lower_bound && self.neg as f64 >= self.neg_lower_bound
    }
}

pub fn prime_sign_estimator<S: Scalar>(tf: &EigenTable<S>, tg: &EigenTable<S>, x: usize, tol: f64) -> Result<PrimeSignEstimate> {
    check_cutoff(tf, x)?;
    check_cutoff(tg, x)?;
    let mut est = PrimeSignEstimate {
        x,
        primes: 0,
        s_plus: 0.0,
        s_minus: 0.0,
        pos_lower_bound: 0.0,
        neg_lower_bound: 0.0,
        pos: 0,
        neg: 0,
        zero: 0,
        max_abs_product: 0.0,
    };
    for p in primes_up_to(x as u64) {
        let (a, b) = (tf.get(p as usize), tg.get(p as usize));
        let v = a.to_f64() * b.to_f64();
        est.primes += 1;
        est.s_plus += (v + 16.0) * v;
        est.s_minus += (v - 16.0) * v;
        est.max_abs_product = est.max_abs_product.max(v.abs());
        match sign_of(a, tol) * sign_of(b, tol) {
            0 => est.zero += 1,
            1 => est.pos += 1,
            _ => est.neg += 1,
        }
    }
    est.pos_lower_bound = est.s_plus / 512.0;
    est.neg_lower_bound = est.s_minus / 512.0;
    Ok(est)
}

/// Default margin in `#{p ≤ x : |λ_G(p)| > c} ≥ (16/17)·x/ln x`.
pub const HYPOTHESIS_FRACTION: f64 = 16.0 / 17.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisCheck {
    pub x: usize,
    pub c: f64,
    pub fraction: f64,
    pub count: u64,
    pub primes: u64,
    pub threshold: f64,
    pub pass: bool,
}

pub fn hypothesis_check<S: Scalar>(tg: &EigenTable<S>, c: f64, x: usize, fraction: f64) -> Result<HypothesisCheck> {
    if !(c > 0.0 && c < 4.0) {
        return Err(Error::OutOfRange(format!("c = {c} outside (0, 4)")));
    }
    if x < 2 {
        return Err(Error::OutOfRange(format!("x = {x} leaves no primes")));
    }
    check_cutoff(tg, x)?;
    let primes = primes_up_to(x as u64);
    let count = primes.iter().filter(|&&p| tg.get(p as usize).magnitude() > c).count() as u64;
    let threshold = fraction * x as f64 / (x as f64).ln();
    Ok(HypothesisCheck {
        x,
        c,
        fraction,
        count,
        primes: primes.len() as u64,
        threshold,
        pass: count as f64 >= threshold,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZeroDensityReport {
    pub x: usize,
    pub delta: f64,
    pub count: u64,
    pub primes: u64,
    /// `x / (ln x)^{1+δ}`
    pub reference: f64,
}

/// Counts primes `p ≤ x` with `λ(p) = 0` (within `tol`) next to the reference curve.
pub fn zero_density_report<S: Scalar>(t: &EigenTable<S>, x: usize, delta: f64, tol: f64) -> Result<ZeroDensityReport> {
    if !(delta > 0.0) {
        return Err(Error::OutOfRange(format!("delta = {delta} must be positive")));
    }
    check_cutoff(t, x)?;
    let primes = primes_up_to(x as u64);
    let count = primes
        .iter()
        .filter(|&&p| t.get(p as usize).is_zero_within(tol))
        .count() as u64;
    let lx = (x.max(2) as f64).ln();
    Ok(ZeroDensityReport {
        x,
        delta,
        count,
        primes: primes.len() as u64,
        reference: x as f64 / lx.powf(1.0 + delta),
    })
}
