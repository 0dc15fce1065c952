//! Joint non-vanishing of `λ_F(pⁿ)λ_G(pⁿ)` for small `n`.
//!
//! Two seeds at the same prime always have some `n ≤ 14` with
//! `λ_F(pⁿ)λ_G(pⁿ) ≠ 0`. This module carries the algebra behind that bound (the
//! `f_n` polynomials, the forbidden vanishing patterns, the case split) and
//! searches for the first such `n` directly.

mod sweep;

pub use sweep::{
    replay_draws, sweep_nonvanishing, Anomaly, NonvanishReport, SeedDraw, SweepConfig, SweepMode,
    Validity,
};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::eigen::{prime_power_values, HeckeSeed, PrimePowers, SeedScalar};
use crate::error::{Error, Result};

/// Largest exponent the theorem needs.
pub const THEOREM_BOUND: usize = 14;

/// `f_n` with `f₀ = −1`, `f₁ = −x`, `f_{n+1} = x·f_n − f_{n−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FPoly {
    pub n: usize,
    /// Constant term first; `coeffs.len() == n + 1`.
    pub coeffs: Vec<BigInt>,
}

impl FPoly {
    pub fn leading(&self) -> &BigInt {
        self.coeffs.last().expect("f_n has n + 1 coefficients")
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(<BigRational as Zero>::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()))
    }
}

/// The polynomials `f_0, …, f_n`.
pub fn f_family_upto(n: usize) -> Vec<FPoly> {
    let mut out: Vec<FPoly> = Vec::with_capacity(n + 1);
    out.push(FPoly {
        n: 0,
        coeffs: vec![-BigInt::one()],
    });
    if n >= 1 {
        out.push(FPoly {
            n: 1,
            coeffs: vec![BigInt::zero(), -BigInt::one()],
        });
    }
    for m in 2..=n {
        // x·f_{m−1} − f_{m−2}
        let mut coeffs = vec![BigInt::zero(); m + 1];
        for (i, c) in out[m - 1].coeffs.iter().enumerate() {
            coeffs[i + 1] += c;
        }
        for (i, c) in out[m - 2].coeffs.iter().enumerate() {
            coeffs[i] -= c;
        }
        out.push(FPoly { n: m, coeffs });
    }
    out
}

pub fn f_family(n: usize) -> FPoly {
    f_family_upto(n).pop().expect("nonempty")
}

/// Evaluates `f_n(x)` for a non-integer rational `x` and insists the value is
/// nonzero.
pub fn f_no_rational_root(n: usize, x: &BigRational) -> Result<BigRational> {
    if x.is_integer() {
        return Err(Error::IntegerArgument(x.to_string()));
    }
    let value = f_family(n).eval(x);
    if value.is_zero() {
        return Err(Error::LemmaViolated {
            n,
            x: x.to_string(),
        });
    }
    Ok(value)
}

/// Where the values `λ(p), …, λ(p^window)` of one seed vanish, and whether
/// any of the forbidden zero patterns occur.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternReport {
    pub p: u64,
    pub window: usize,
    pub lam_p_zero: bool,
    /// Exponents `1 ≤ n ≤ window` with `λ(pⁿ) = 0`.
    pub zero_exponents: Vec<usize>,
    /// Every odd exponent in the window vanishes.
    pub odd_all_zero: bool,
    /// First `t` with `λ(p^{t+1}) = … = λ(p^{t+4}) = 0`.
    pub consecutive_run: Option<usize>,
    /// First `m ≥ 1` with all of `λ(p^{2(m+i)+1})`, `i = 0..3`, zero (checked when `λ(p) ≠ 0`).
    pub odd_run: Option<usize>,
    /// First `m ≥ 1` with all of `λ(p^{2(m+i)})`, `i = 0..3`, zero (checked when `λ(p) ≠ 0`).
    pub even_run: Option<usize>,
}

impl PatternReport {
    /// No forbidden pattern, and odd exponents vanish exactly when `λ(p)` does.
    pub fn consistent(&self) -> bool {
        self.odd_all_zero == self.lam_p_zero
            && self.consecutive_run.is_none()
            && self.odd_run.is_none()
            && self.even_run.is_none()
    }
}

pub const MAX_PATTERN_WINDOW: usize = 200;

pub fn vanishing_pattern_scan<S: SeedScalar>(
    seed: &HeckeSeed<S>,
    window: usize,
    tol: f64,
) -> Result<PatternReport> {
    if window > MAX_PATTERN_WINDOW {
        return Err(Error::OutOfRange(format!(
            "window {window} exceeds {MAX_PATTERN_WINDOW}"
        )));
    }
    let values = prime_power_values(seed, window);
    let zero: Vec<bool> = values.iter().map(|v| v.is_zero_within(tol)).collect();
    let lam_p_zero = window >= 1 && zero[1];
    let zero_exponents = (1..=window).filter(|&n| zero[n]).collect();
    let odd_all_zero = (1..=window).step_by(2).all(|n| zero[n]);
    let all_zero = |mut exps: Box<dyn Iterator<Item = usize>>| exps.all(|n| zero[n]);

    let consecutive_run = (0..)
        .take_while(|t| t + 4 <= window)
        .find(|&t| all_zero(Box::new(t + 1..=t + 4)));
    let (odd_run, even_run) = if lam_p_zero {
        (None, None)
    } else {
        let odd = (1..)
            .take_while(|m| 2 * (m + 3) + 1 <= window)
            .find(|&m| all_zero(Box::new((0..4).map(move |i| 2 * (m + i) + 1))));
        let even = (1..)
            .take_while(|m| 2 * (m + 3) <= window)
            .find(|&m| all_zero(Box::new((0..4).map(move |i| 2 * (m + i)))));
        (odd, even)
    };
    Ok(PatternReport {
        p: seed.p(),
        window,
        lam_p_zero,
        zero_exponents,
        odd_all_zero,
        consecutive_run,
        odd_run,
        even_run,
    })
}

/// Branches of the case analysis, by the zero pattern of `(λ(p), λ(p²))` for
/// the two seeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CaseTag {
    /// `λ_F(p)λ_G(p) ≠ 0` or `λ_F(p²)λ_G(p²) ≠ 0`: settled at `n ≤ 2`.
    Trivial,
    /// All four values vanish.
    AllZero,
    /// Both `λ(p)` vanish, one `λ(p²)` does not.
    FZeroG2Nonzero,
    /// One seed is `(0, 0)`, the other has `λ(p) ≠ 0`.
    FZeroG1Nonzero,
    /// `F = (0, ≠0)`, `G = (≠0, 0)`.
    MixedF2G1,
    /// The mixed case at `p = 2` with `λ_G(2)² = 1/2`, where `λ_G(2⁶) = 0`.
    P2Boundary,
}

impl CaseTag {
    /// The largest first joint non-vanishing index the case analysis allows.
    pub fn predicted_bound(self) -> usize {
        match self {
            CaseTag::Trivial => 2,
            CaseTag::AllZero => 4,
            CaseTag::FZeroG2Nonzero => 6,
            CaseTag::FZeroG1Nonzero => 10,
            CaseTag::MixedF2G1 => 14,
            CaseTag::P2Boundary => 10,
        }
    }

    pub const ALL: [CaseTag; 6] = [
        CaseTag::Trivial,
        CaseTag::AllZero,
        CaseTag::FZeroG2Nonzero,
        CaseTag::FZeroG1Nonzero,
        CaseTag::MixedF2G1,
        CaseTag::P2Boundary,
    ];
}

/// A case tag together with whether the roles of `F` and `G` had to be swapped
/// to match the branch's naming.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub tag: CaseTag,
    pub swapped: bool,
}

fn check_same_prime(p: u64, q: u64) -> Result<()> {
    if p != q {
        return Err(Error::OutOfRange(format!("seeds at different primes {p} and {q}")));
    }
    Ok(())
}

pub fn classify_case<S: SeedScalar>(
    f: &HeckeSeed<S>,
    g: &HeckeSeed<S>,
    tol: f64,
) -> Result<Classification> {
    check_same_prime(f.p(), g.p())?;
    let z = |x: &S| x.is_zero_within(tol);
    let (af, bf, ag, bg) = (z(f.lam_p()), z(f.lam_p2()), z(g.lam_p()), z(g.lam_p2()));
    let unswapped = |tag| Classification { tag, swapped: false };
    let swapped = |tag| Classification { tag, swapped: true };
    if (!af && !ag) || (!bf && !bg) {
        return Ok(unswapped(CaseTag::Trivial));
    }
    let mixed = |g: &HeckeSeed<S>| {
        let a2 = g.lam_p().clone() * g.lam_p().clone();
        if g.p() == 2 && a2.close_to(&S::from_ratio(1, 2), tol) {
            CaseTag::P2Boundary
        } else {
            CaseTag::MixedF2G1
        }
    };
    Ok(match (af, bf, ag, bg) {
        (true, true, true, true) => unswapped(CaseTag::AllZero),
        (true, true, true, false) => unswapped(CaseTag::FZeroG2Nonzero),
        (true, false, true, true) => swapped(CaseTag::FZeroG2Nonzero),
        (true, true, false, _) => unswapped(CaseTag::FZeroG1Nonzero),
        (false, _, true, true) => swapped(CaseTag::FZeroG1Nonzero),
        (true, false, false, true) => unswapped(mixed(g)),
        (false, true, true, false) => swapped(mixed(f)),
        _ => unreachable!("remaining patterns have a nonzero product at n ≤ 2"),
    })
}

/// The first `n ≥ 1` with `λ_F(pⁿ)λ_G(pⁿ) ≠ 0`, searched up to `max_n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NonvanishWitness<S> {
    pub p: u64,
    pub case: Classification,
    /// `None` when every product up to `max_n` vanished.
    pub index: Option<usize>,
    pub product: Option<S>,
    pub max_n: usize,
}

impl<S> NonvanishWitness<S> {
    /// A valid pair without a witness up to the theorem's bound.
    pub fn is_anomaly(&self) -> bool {
        self.index.is_none_or(|n| n > THEOREM_BOUND)
    }

    pub fn within_case_bound(&self) -> bool {
        self.index.is_some_and(|n| n <= self.case.tag.predicted_bound())
    }
}

pub fn first_joint_nonvanishing<S: SeedScalar>(
    f: &HeckeSeed<S>,
    g: &HeckeSeed<S>,
    max_n: usize,
    tol: f64,
) -> Result<NonvanishWitness<S>> {
    let case = classify_case(f, g, tol)?;
    let hit = PrimePowers::new(f)
        .zip(PrimePowers::new(g))
        .take(max_n + 1)
        .enumerate()
        .skip(1)
        .find_map(|(n, (x, y))| {
            let prod = x * y;
            (!prod.is_zero_within(tol)).then_some((n, prod))
        });
    Ok(NonvanishWitness {
        p: f.p(),
        case,
        index: hit.as_ref().map(|(n, _)| *n),
        product: hit.map(|(_, v)| v),
        max_n,
    })
}

/// Smallest absolute value among the nonzero products `λ_F(pⁿ)λ_G(pⁿ)` for
/// `n ≤ max_n`, as a float; a tiny value means a float zero test is unsafe.
pub fn min_nonzero_product_magnitude(f: &HeckeSeed<f64>, g: &HeckeSeed<f64>, max_n: usize) -> f64 {
    let vf = prime_power_values(f, max_n);
    let vg = prime_power_values(g, max_n);
    (1..=max_n)
        .map(|n| (vf[n] * vg[n]).abs())
        .filter(|m| *m != 0.0)
        .fold(f64::INFINITY, f64::min)
}

/// `1/p` as an exact rational.
pub fn inv_prime(p: u64) -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(p))
}

/// Whether every coefficient is an integer and the top one is `−1`.
pub fn has_lemma_shape(poly: &FPoly) -> bool {
    poly.coeffs.len() == poly.n + 1 && poly.leading().is_negative() && poly.leading().abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{lambda_prime_power, ExactSeed};
    use crate::scalar::{GradedRational, Parity};

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn odd(n: i64, d: i64, p: u64) -> GradedRational {
        GradedRational::new(q(n, d), Parity::Odd, p)
    }

    fn even(n: i64, d: i64) -> GradedRational {
        GradedRational::from_ints(n, d)
    }

    fn seed(p: u64, a: GradedRational, b: GradedRational) -> ExactSeed {
        ExactSeed::new(p, a, b).unwrap()
    }

    #[test]
    fn small_members() {
        assert_eq!(f_family(0).coeffs, ints(&[-1]));
        assert_eq!(f_family(1).coeffs, ints(&[0, -1]));
        assert_eq!(f_family(2).coeffs, ints(&[1, 0, -1]));
        assert_eq!(f_family(3).coeffs, ints(&[0, 2, 0, -1]));
    }

    #[test]
    fn lemma_shape_through_thirty() {
        for poly in f_family_upto(30) {
            assert!(has_lemma_shape(&poly), "f_{}", poly.n);
        }
    }

    #[test]
    fn rational_evaluations() {
        assert_eq!(f_no_rational_root(2, &q(1, 2)).unwrap(), q(3, 4));
        for p in [2i64, 3, 5, 97] {
            assert_eq!(f_no_rational_root(1, &q(1, p)).unwrap(), q(-1, p));
        }
        assert!(matches!(
            f_no_rational_root(3, &q(4, 2)),
            Err(Error::IntegerArgument(_))
        ));
    }

    #[test]
    fn integer_roots_exist() {
        // the lemma needs x ∉ ℤ: f_2(1) = 0
        assert!(f_family(2).eval(&q(1, 1)).is_zero());
    }

    #[test]
    fn zero_seed_even_powers_are_f_values() {
        let p = 2u64;
        let s = seed(p, odd(0, 1, p), even(0, 1));
        assert_eq!(f_family(2).eval(&inv_prime(p)), q(3, 4));
        assert_eq!(lambda_prime_power(&s, 8), even(3, 4));
    }

    #[test]
    fn zero_seed_pattern() {
        let p = 5;
        let r = vanishing_pattern_scan(&seed(p, odd(0, 1, p), even(0, 1)), 40, 0.0).unwrap();
        let mut expected: Vec<usize> = (1..=40).step_by(2).collect();
        expected.push(2);
        expected.sort();
        assert_eq!(r.zero_exponents, expected);
        assert!(r.odd_all_zero && r.consistent());
    }

    #[test]
    fn odd_exponents_vanish_with_lam_p() {
        let p = 7;
        let r = vanishing_pattern_scan(&seed(p, odd(0, 1, p), even(3, 2)), 60, 0.0).unwrap();
        assert!(r.lam_p_zero && r.odd_all_zero && r.consistent());
    }

    #[test]
    fn window_is_capped() {
        let p = 3;
        assert!(vanishing_pattern_scan(&seed(p, odd(1, 1, p), even(0, 1)), 201, 0.0).is_err());
    }

    #[test]
    fn case_examples() {
        let p = 3;
        let zero = seed(p, odd(0, 1, p), even(0, 1));
        let f2 = seed(p, odd(0, 1, p), even(1, 1));
        let g1 = seed(p, odd(1, 1, p), even(0, 1));
        assert_eq!(classify_case(&zero, &zero, 0.0).unwrap().tag, CaseTag::AllZero);
        let c = classify_case(&f2, &g1, 0.0).unwrap();
        assert_eq!((c.tag, c.swapped), (CaseTag::MixedF2G1, false));
        let c = classify_case(&g1, &f2, 0.0).unwrap();
        assert_eq!((c.tag, c.swapped), (CaseTag::MixedF2G1, true));
        assert_eq!(classify_case(&zero, &f2, 0.0).unwrap().tag, CaseTag::FZeroG2Nonzero);
        assert_eq!(classify_case(&g1, &zero, 0.0).unwrap().tag, CaseTag::FZeroG1Nonzero);
        assert_eq!(classify_case(&g1, &g1, 0.0).unwrap().tag, CaseTag::Trivial);

        let f = seed(2, odd(0, 1, 2), even(1, 1));
        let boundary = seed(2, odd(1, 1, 2), even(0, 1));
        assert_eq!(classify_case(&f, &boundary, 0.0).unwrap().tag, CaseTag::P2Boundary);
    }

    #[test]
    fn witness_examples() {
        let p = 3;
        let zero = seed(p, odd(0, 1, p), even(0, 1));
        let w = first_joint_nonvanishing(&zero, &zero, 14, 0.0).unwrap();
        assert_eq!((w.index, w.product), (Some(4), Some(even(1, 1))));

        let g = seed(p, even(1, 1), even(1, 1));
        let w = first_joint_nonvanishing(&zero, &g, 14, 0.0).unwrap();
        assert_eq!((w.index, w.product), (Some(4), Some(even(-8, 3))));
    }

    #[test]
    fn p2_boundary_reaches_eight() {
        let g = seed(2, odd(1, 1, 2), even(0, 1));
        let vals = prime_power_values(&g, 10);
        assert!(vals[4].is_zero() && vals[6].is_zero());
        assert_eq!(vals[8], even(-1, 1));
        assert_eq!(vals[10], even(-1, 2));
        // F = (0, 1) at 2: λ_F(2⁴) = (1 + 1/2)·1 − 1 = 1/2, λ_F(2⁸) ≠ 0
        let f = seed(2, odd(0, 1, 2), even(1, 1));
        let vf = prime_power_values(&f, 8);
        let w = first_joint_nonvanishing(&f, &g, 14, 0.0).unwrap();
        assert_eq!(w.index, Some(8));
        assert_eq!(w.product, Some(vf[8].clone() * even(-1, 1)));
        assert!(w.within_case_bound());
    }

    #[test]
    fn float_witness_matches_exact() {
        let p = 5;
        let f = seed(p, odd(0, 1, p), even(2, 3));
        let g = seed(p, odd(3, 2, p), even(0, 1));
        let exact = first_joint_nonvanishing(&f, &g, 14, 0.0).unwrap();
        let float = first_joint_nonvanishing(&f.to_float(), &g.to_float(), 14, 1e-9).unwrap();
        assert_eq!(exact.index, float.index);
        assert_eq!(exact.case, float.case);
    }
}
