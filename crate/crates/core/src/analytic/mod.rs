//! Dirichlet series attached to a pair of eigenforms.
//!
//! `L(F, G; s) = Σ λ_F(n)λ_G(n) n^{−s}` factors as `g(s)·L(F × G, s)`, where
//! `L(F × G, s)` has local factors `1 / Π(1 − αᵢβⱼp^{−s})` and `g` is the
//! Euler product of the polynomials `g_p(p^{−s})`. Everything here works with
//! coefficient lists truncated at a cutoff `N`.

mod gamma;
mod sums;

pub use gamma::{
    archimedean_ratio, convexity_monitor, gamma_factors, ln_gamma, rademacher_bound,
    ArchimedeanRatio, ConvexityReport, GammaEntry, GammaFactorList, GammaKind, RademacherParams,
};
pub use sums::{log_spaced_checkpoints, partial_sum_experiment, write_curve_csv, PartialSumReport};

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::{prime_power_values, EigenSystem, EigenTable, HeckeSeed, SeedScalar};
use crate::error::{Error, Result};
use crate::gf::{local_rankin_factor_exact, local_rankin_factor_exact_to, poly_eval, poly_mul, LocalRankinFactor};
use crate::primes::{peel_smallest, primes_up_to, smallest_prime_factors};
use crate::scalar::Scalar;

/// Coefficients `a(1), …, a(N)` of a Dirichlet series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirichletSeries<S> {
    pub label: String,
    /// `coeffs[n - 1] = a(n)`.
    coeffs: Vec<S>,
}

impl<S: Scalar> DirichletSeries<S> {
    pub fn new(label: impl Into<String>, coeffs: Vec<S>) -> Self {
        Self {
            label: label.into(),
            coeffs,
        }
    }

    pub fn cutoff(&self) -> usize {
        self.coeffs.len()
    }

    /// `a(n)`; panics outside `1..=cutoff`.
    pub fn coeff(&self, n: usize) -> &S {
        &self.coeffs[n - 1]
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }
}

/// `λ_F(n)λ_G(n)` for `n ≤ N`.
pub fn coeffs_lfg<S: Scalar>(tf: &EigenTable<S>, tg: &EigenTable<S>) -> Result<DirichletSeries<S>> {
    if tf.cutoff() != tg.cutoff() {
        return Err(Error::CutoffMismatch {
            left: tf.cutoff(),
            right: tg.cutoff(),
        });
    }
    let coeffs = tf
        .values()
        .iter()
        .zip(tg.values())
        .map(|(a, b)| a.clone() * b.clone())
        .collect();
    Ok(DirichletSeries::new("L(F,G)", coeffs))
}

/// Builds a multiplicative series from local coefficient lists:
/// `a(n) = Π_p local[p][v_p(n)]`, missing entries read as zero.
fn assemble_multiplicative<S: Scalar>(
    n: usize,
    local: impl Fn(u64) -> Option<Vec<S>>,
) -> Result<Vec<S>> {
    let spf = smallest_prime_factors(n);
    let mut table: BTreeMap<u64, Vec<S>> = BTreeMap::new();
    for p in primes_up_to(n as u64) {
        table.insert(p, local(p).ok_or(Error::MissingPrime { p })?);
    }
    let mut out: Vec<S> = Vec::with_capacity(n);
    if n >= 1 {
        out.push(S::one());
    }
    for m in 2..=n {
        let (p, e, rest) = peel_smallest(m, &spf);
        let pe = table[&p].get(e as usize).cloned().unwrap_or_else(S::zero);
        out.push(if rest == 1 {
            pe
        } else {
            pe * out[rest - 1].clone()
        });
    }
    Ok(out)
}

fn max_exponent(p: u64, n: usize) -> usize {
    let mut e = 0;
    let mut pe = 1u64;
    while pe * p <= n as u64 {
        pe *= p;
        e += 1;
    }
    e
}

/// Coefficients of `L(F × G, s) = Π_p 1 / den_p(p^{−s})` through `N`.
pub fn coeffs_rankin<S: Scalar>(
    factors: &BTreeMap<u64, LocalRankinFactor<S>>,
    n: usize,
) -> Result<DirichletSeries<S>> {
    let coeffs = assemble_multiplicative(n, |p| {
        factors.get(&p).map(|f| f.euler_coeffs(max_exponent(p, n)))
    })?;
    Ok(DirichletSeries::new("L(FxG)", coeffs))
}

/// Coefficients of `g(s) = Π_p g_p(p^{−s})` through `N`.
pub fn coeffs_g<S: Scalar>(
    factors: &BTreeMap<u64, LocalRankinFactor<S>>,
    n: usize,
) -> Result<DirichletSeries<S>> {
    let coeffs = assemble_multiplicative(n, |p| factors.get(&p).map(|f| f.gp.clone()))?;
    Ok(DirichletSeries::new("g", coeffs))
}

/// The exact-route local factors at every prime `≤ n`, computed in parallel.
pub fn rankin_factors<S: SeedScalar>(
    sf: &EigenSystem<S>,
    sg: &EigenSystem<S>,
    n: usize,
) -> Result<BTreeMap<u64, LocalRankinFactor<S>>> {
    primes_up_to(n as u64)
        .into_par_iter()
        .map(|p| {
            let f = sf.seed(p).ok_or(Error::MissingPrime { p })?;
            let g = sg.seed(p).ok_or(Error::MissingPrime { p })?;
            Ok((p, local_rankin_factor_exact(f, g)?))
        })
        .collect()
}

/// Like [`rankin_factors`], but each factor is only computed modulo
/// `T^{e+1}` with `p^e ≤ n < p^{e+1}`. The series built from these agree
/// with the full ones through `n`; `g_p` itself is not complete.
pub fn rankin_factors_to_cutoff<S: SeedScalar>(
    sf: &EigenSystem<S>,
    sg: &EigenSystem<S>,
    n: usize,
) -> Result<BTreeMap<u64, LocalRankinFactor<S>>> {
    primes_up_to(n as u64)
        .into_par_iter()
        .map(|p| {
            let f = sf.seed(p).ok_or(Error::MissingPrime { p })?;
            let g = sg.seed(p).ok_or(Error::MissingPrime { p })?;
            Ok((p, local_rankin_factor_exact_to(f, g, max_exponent(p, n))?))
        })
        .collect()
}

/// `(a * b)(n) = Σ_{d | n} a(d) b(n/d)`.
pub fn dirichlet_convolve<S: Scalar>(
    a: &DirichletSeries<S>,
    b: &DirichletSeries<S>,
) -> Result<DirichletSeries<S>> {
    let n = check_cutoffs(a, b)?;
    let mut out = vec![S::zero(); n];
    for d in 1..=n {
        let ad = a.coeff(d);
        if ad.is_zero_within(0.0) {
            continue;
        }
        for m in 1..=n / d {
            let bm = b.coeff(m);
            if !bm.is_zero_within(0.0) {
                out[d * m - 1] = out[d * m - 1].clone() + ad.clone() * bm.clone();
            }
        }
    }
    Ok(DirichletSeries::new(format!("{}*{}", a.label, b.label), out))
}

fn check_cutoffs<S: Scalar>(a: &DirichletSeries<S>, b: &DirichletSeries<S>) -> Result<usize> {
    if a.cutoff() != b.cutoff() {
        return Err(Error::CutoffMismatch {
            left: a.cutoff(),
            right: b.cutoff(),
        });
    }
    Ok(a.cutoff())
}

/// Agreement of `L(F, G)` with `g * L(F × G)` coefficient by coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub cutoff: usize,
    /// All differences vanish identically (meaningful for exact scalars).
    pub exact: bool,
    pub max_abs_residual: f64,
    /// `|difference| / max(1, Σ_{d|n} |g(d)||r(n/d)|)`, maximized over `n`.
    pub max_scaled_residual: f64,
    pub worst_n: usize,
}

pub fn global_identity_check<S: Scalar>(
    lfg: &DirichletSeries<S>,
    g: &DirichletSeries<S>,
    rankin: &DirichletSeries<S>,
) -> Result<IdentityCheck> {
    let n = check_cutoffs(lfg, g)?;
    check_cutoffs(g, rankin)?;
    let conv = dirichlet_convolve(g, rankin)?;
    let mut scale = vec![0.0f64; n];
    for d in 1..=n {
        let gd = g.coeff(d).magnitude();
        if gd == 0.0 {
            continue;
        }
        for m in 1..=n / d {
            scale[d * m - 1] += gd * rankin.coeff(m).magnitude();
        }
    }
    let mut check = IdentityCheck {
        cutoff: n,
        exact: true,
        max_abs_residual: 0.0,
        max_scaled_residual: 0.0,
        worst_n: 1,
    };
    for k in 1..=n {
        let diff = lfg.coeff(k).clone() - conv.coeff(k).clone();
        if diff.is_zero_within(0.0) {
            continue;
        }
        check.exact = false;
        let abs = diff.magnitude();
        let scaled = abs / scale[k - 1].max(1.0);
        check.max_abs_residual = check.max_abs_residual.max(abs);
        if scaled > check.max_scaled_residual {
            check.max_scaled_residual = scaled;
            check.worst_n = k;
        }
    }
    Ok(check)
}

/// `max_{n ≤ depth} |[Tⁿ] (Σ λ_F(pᵏ)λ_G(pᵏ)Tᵏ)·den(T) − g_p(T)|`, with the
/// product sequence taken from the recurrence rather than the factor.
pub fn identity_residual<S: SeedScalar>(
    factor: &LocalRankinFactor<S>,
    f: &HeckeSeed<S>,
    g: &HeckeSeed<S>,
    depth: usize,
) -> f64 {
    let vf = prime_power_values(f, depth);
    let vg = prime_power_values(g, depth);
    let prod: Vec<S> = vf.into_iter().zip(vg).map(|(x, y)| x * y).collect();
    let lhs = poly_mul(&prod, &factor.den);
    (0..=depth)
        .map(|n| {
            let gp = factor.gp.get(n).cloned().unwrap_or_else(S::zero);
            (lhs[n].clone() - gp).magnitude()
        })
        .fold(0.0, f64::max)
}

/// [`identity_residual`] for the exact-route factor of the two seeds.
pub fn identity_check_per_prime<S: SeedScalar>(
    f: &HeckeSeed<S>,
    g: &HeckeSeed<S>,
    depth: usize,
) -> Result<f64> {
    let factor = local_rankin_factor_exact(f, g)?;
    Ok(identity_residual(&factor, f, g, depth))
}

/// A truncated evaluation of `|g(σ)|` next to `σ^A (σ − 1/2)^{−A}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GBoundCheck {
    pub sigma: f64,
    pub exponent_a: f64,
    pub constant: f64,
    /// Largest prime in the truncated product.
    pub truncation: u64,
    pub estimate: f64,
    /// Bound on `|ln Π_{p > P} g_p(p^{−σ})|`, from the largest coefficient seen.
    pub tail_log_bound: f64,
    pub bound: f64,
    pub ratio: f64,
    /// `estimate > constant·bound`.
    pub flagged: bool,
}

pub const DEFAULT_A: f64 = 16.0;

pub fn g_bound_check(
    factors: &BTreeMap<u64, LocalRankinFactor<f64>>,
    sigma: f64,
    exponent_a: f64,
    constant: f64,
) -> Result<GBoundCheck> {
    if sigma <= 0.5 {
        return Err(Error::OutOfRange(format!("sigma = {sigma} must exceed 1/2")));
    }
    let truncation = factors.keys().copied().max().unwrap_or(1);
    let mut ln_est = 0.0f64;
    let mut coeff_bound = 0.0f64;
    for (&p, f) in factors {
        let x = (p as f64).powf(-sigma);
        ln_est += poly_eval(&f.gp, &x).abs().ln();
        coeff_bound = f.gp.iter().skip(2).map(|c| c.abs()).fold(coeff_bound, f64::max);
    }
    // Σ_{p>P} B·p^{−2σ}/(1 − p^{−σ}) ≤ B/(1 − P^{−σ}) · P^{1−2σ} / ((2σ − 1) ln P)
    let pp = (truncation.max(2)) as f64;
    let tail_log_bound = coeff_bound / (1.0 - pp.powf(-sigma)) * pp.powf(1.0 - 2.0 * sigma)
        / ((2.0 * sigma - 1.0) * pp.ln());
    let estimate = ln_est.exp();
    let bound = sigma.powf(exponent_a) * (sigma - 0.5).powf(-exponent_a);
    Ok(GBoundCheck {
        sigma,
        exponent_a,
        constant,
        truncation,
        estimate,
        tail_log_bound,
        bound,
        ratio: estimate / bound,
        flagged: estimate > constant * bound,
    })
}
