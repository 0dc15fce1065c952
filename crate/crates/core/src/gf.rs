//! Rational generating functions and their Hadamard (coefficientwise) products.
//!
//! Polynomials are dense coefficient vectors, constant term first. All degrees
//! here stay below ~20, so there is no sparse representation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::eigen::{spin_poly, HeckeSeed, SeedScalar};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Product of two dense polynomials.
pub fn poly_mul<S: Scalar>(a: &[S], b: &[S]) -> Vec<S> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![S::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero_within(0.0) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].clone() + x.clone() * y.clone();
        }
    }
    out
}

/// `Σ cᵢ xⁱ` by Horner's rule.
pub fn poly_eval<S: Scalar>(coeffs: &[S], x: &S) -> S {
    coeffs
        .iter()
        .rev()
        .fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
}

/// Drops trailing coefficients that vanish within `tol`, keeping at least one.
pub fn trim<S: Scalar>(mut coeffs: Vec<S>, tol: f64) -> Vec<S> {
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero_within(tol)) {
        coeffs.pop();
    }
    coeffs
}

/// Degree of a coefficient vector, ignoring trailing zeros within `tol`.
pub fn degree<S: Scalar>(coeffs: &[S], tol: f64) -> usize {
    coeffs
        .iter()
        .rposition(|c| !c.is_zero_within(tol))
        .unwrap_or(0)
}

/// `Π (1 − αT)^ℓ` over the listed roots.
pub fn expand_factors<S: Scalar>(factors: &[(S, usize)]) -> Vec<S> {
    let mut out = vec![S::one()];
    for (alpha, mult) in factors {
        let linear = [S::one(), -alpha.clone()];
        for _ in 0..*mult {
            out = poly_mul(&out, &linear);
        }
    }
    out
}

/// Merges roots closer than `tol`; merged roots are replaced by their
/// multiplicity-weighted mean.
pub fn merge_roots<S: Scalar>(roots: impl IntoIterator<Item = (S, usize)>, tol: f64) -> Vec<(S, usize)> {
    let mut merged: Vec<(S, usize)> = Vec::new();
    for (r, m) in roots {
        if let Some(slot) = merged.iter_mut().find(|(x, _)| x.close_to(&r, tol)) {
            if !S::EXACT {
                let total = slot.1 + m;
                slot.0 = (slot.0.clone() * S::from_ratio(slot.1 as i64, 1)
                    + r * S::from_ratio(m as i64, 1))
                    / S::from_ratio(total as i64, 1);
            }
            slot.1 += m;
        } else {
            merged.push((r, m));
        }
    }
    merged
}

/// `P(T) / Q(T)` with `Q(0) ≠ 0` and an optional factorization of `Q`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalGF<S> {
    num: Vec<S>,
    den: Vec<S>,
    factored_den: Option<Vec<(S, usize)>>,
}

impl<S: Scalar> RationalGF<S> {
    pub fn new(num: Vec<S>, den: Vec<S>) -> Result<Self> {
        match den.first() {
            None => return Err(Error::MalformedDenominator("empty denominator")),
            Some(d0) if d0.is_zero_within(0.0) => {
                return Err(Error::MalformedDenominator("constant term is zero"))
            }
            _ => {}
        }
        Ok(Self {
            num: if num.is_empty() { vec![S::zero()] } else { num },
            den,
            factored_den: None,
        })
    }

    /// Builds the denominator from its factorization `Π (1 − αT)^ℓ`.
    pub fn from_factors(num: Vec<S>, factors: Vec<(S, usize)>) -> Result<Self> {
        let den = expand_factors(&factors);
        let mut gf = Self::new(num, den)?;
        gf.factored_den = Some(factors);
        Ok(gf)
    }

    /// Attaches a factorization, checking that it expands to the stored
    /// denominator (exactly, or within `1e-12` relative in float mode).
    pub fn with_factorization(mut self, factors: Vec<(S, usize)>) -> Result<Self> {
        let expanded = expand_factors(&factors);
        let len = expanded.len().max(self.den.len());
        let scale = self
            .den
            .iter()
            .map(Scalar::magnitude)
            .fold(1.0f64, f64::max);
        let mut residual = 0.0f64;
        for i in 0..len {
            let a = expanded.get(i).cloned().unwrap_or_else(S::zero);
            let b = self.den.get(i).cloned().unwrap_or_else(S::zero);
            if S::EXACT {
                if a != b {
                    return Err(Error::FactorizationMismatch(f64::INFINITY));
                }
            } else {
                residual = residual.max((a - b).magnitude());
            }
        }
        if residual > 1e-12 * scale {
            return Err(Error::FactorizationMismatch(residual));
        }
        self.factored_den = Some(factors);
        Ok(self)
    }

    pub fn num(&self) -> &[S] {
        &self.num
    }

    pub fn den(&self) -> &[S] {
        &self.den
    }

    pub fn factored_den(&self) -> Option<&[(S, usize)]> {
        self.factored_den.as_deref()
    }

    /// Coefficients `a_0, …, a_n` of the power-series expansion.
    pub fn series_coeffs(&self, n: usize) -> Vec<S> {
        let d0 = self.den[0].clone();
        let mut out: Vec<S> = Vec::with_capacity(n + 1);
        for k in 0..=n {
            let mut acc = self.num.get(k).cloned().unwrap_or_else(S::zero);
            for j in 1..self.den.len().min(k + 1) {
                acc = acc - self.den[j].clone() * out[k - j].clone();
            }
            out.push(acc / d0.clone());
        }
        out
    }

    pub fn map<T>(&self, f: impl Fn(&S) -> T) -> RationalGF<T> {
        RationalGF {
            num: self.num.iter().map(&f).collect(),
            den: self.den.iter().map(&f).collect(),
            factored_den: self
                .factored_den
                .as_ref()
                .map(|fs| fs.iter().map(|(r, m)| (f(r), *m)).collect()),
        }
    }
}

/// The generating function of `a_n b_n` for two rational generating functions
/// with factored denominators.
///
/// The denominator is `Π_{i,j} (1 − αᵢβⱼT)^{ℓᵢmⱼ}` with colliding products
/// merged (exactly, or within `tol`). The numerator is recovered by
/// multiplying the coefficientwise product series by that denominator and
/// truncating below its degree.
pub fn hadamard<S: Scalar>(a: &RationalGF<S>, b: &RationalGF<S>, tol: f64) -> Result<RationalGF<S>> {
    let fa = a.factored_den().ok_or(Error::FactorizationMissing)?;
    let fb = b.factored_den().ok_or(Error::FactorizationMissing)?;
    for gf in [a, b] {
        let (dn, dd) = (degree(&gf.num, tol), degree(&gf.den, tol));
        let zero_num = gf.num.iter().all(|c| c.is_zero_within(tol));
        if dn >= dd && !zero_num {
            return Err(Error::ImproperFraction { num: dn, den: dd });
        }
    }
    let products = fa.iter().flat_map(|(alpha, l)| {
        fb.iter()
            .map(move |(beta, m)| (alpha.clone() * beta.clone(), l * m))
    });
    let roots = merge_roots(products, tol);
    let den = expand_factors(&roots);
    let d = den.len() - 1;
    let sa = a.series_coeffs(d.saturating_sub(1));
    let sb = b.series_coeffs(d.saturating_sub(1));
    let prod: Vec<S> = sa.into_iter().zip(sb).map(|(x, y)| x * y).collect();
    let mut num = poly_mul(&prod, &den);
    num.truncate(d.max(1));
    let num = trim(num, if S::EXACT { 0.0 } else { tol });
    RationalGF::from_factors(num, roots)
}

/// `Σ λ(pⁿ)Tⁿ = (1 − T²/p) / spin_poly(T)`; no factorization attached.
pub fn local_spin_gf<S: SeedScalar>(seed: &HeckeSeed<S>) -> RationalGF<S> {
    let num = vec![S::one(), S::zero(), -seed.inv_p()];
    RationalGF::new(num, spin_poly(seed).to_vec()).expect("spin polynomial has constant term 1")
}

/// The local spin generating function over ℂ with its denominator factored
/// into Satake parameters. Requires a Satake-mode seed.
pub fn local_spin_gf_factored(seed: &HeckeSeed<f64>, tol: f64) -> Result<RationalGF<Complex64>> {
    let pair = seed.satake_pair(tol)?;
    let roots = merge_roots(pair.parameters().into_iter().map(|r| (r, 1)), tol);
    local_spin_gf(seed)
        .map(|&x| Complex64::new(x, 0.0))
        .with_factorization(roots)
}

/// Power sums `p_1, …, p_n` of the reciprocal roots of `Q(T) = Π (1 − αT)`.
fn power_sums<S: Scalar>(q: &[S], n: usize) -> Vec<S> {
    // p_k + q_1 p_{k-1} + … + q_{k-1} p_1 + k q_k = 0
    let mut p: Vec<S> = vec![S::zero(); n + 1];
    for k in 1..=n {
        let mut acc = -(q.get(k).cloned().unwrap_or_else(S::zero) * S::from_ratio(k as i64, 1));
        for i in 1..k {
            if let Some(qi) = q.get(i) {
                acc = acc - qi.clone() * p[k - i].clone();
            }
        }
        p[k] = acc;
    }
    p
}

/// `Π_{i,j} (1 − αᵢβⱼT)` from `Q₁ = Π(1 − αᵢT)` and `Q₂ = Π(1 − βⱼT)` without
/// root finding: the power sums of the products are products of power sums.
pub fn tensor_denominator<S: Scalar>(q1: &[S], q2: &[S]) -> Vec<S> {
    tensor_denominator_to(q1, q2, (q1.len() - 1) * (q2.len() - 1))
}

/// [`tensor_denominator`] modulo `T^{d+1}`. The low coefficients depend only
/// on the low power sums, so the truncation is exact.
pub fn tensor_denominator_to<S: Scalar>(q1: &[S], q2: &[S], d: usize) -> Vec<S> {
    let d = d.min((q1.len() - 1) * (q2.len() - 1));
    let pa = power_sums(q1, d);
    let pb = power_sums(q2, d);
    let pc: Vec<S> = pa.into_iter().zip(pb).map(|(x, y)| x * y).collect();
    // k e_k = Σ_{i=1..k} (-1)^{i-1} e_{k-i} p_i, coefficient of T^k is (-1)^k e_k
    let mut out = vec![S::one()];
    for k in 1..=d {
        let mut acc = S::zero();
        for i in 1..=k {
            acc = acc + pc[i].clone() * out[k - i].clone();
        }
        out.push(-acc / S::from_ratio(k as i64, 1));
    }
    out
}

/// The local Rankin–Selberg data at one prime: `Σ λ_F(pⁿ)λ_G(pⁿ)Tⁿ = g_p(T) / den(T)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalRankinFactor<S> {
    pub p: u64,
    /// `g_p`, constant term first, degree at most 15. Both polynomials may
    /// be truncated, see [`local_rankin_factor_exact_to`].
    pub gp: Vec<S>,
    /// `Π (1 − αᵢβⱼT)`, degree 16.
    pub den: Vec<S>,
    /// The sixteen products `αᵢβⱼ` with multiplicities, when a factorization
    /// was available.
    pub den_roots: Option<Vec<(Complex64, usize)>>,
}

impl<S: Scalar> LocalRankinFactor<S> {
    pub fn gp_degree(&self, tol: f64) -> usize {
        degree(&self.gp, tol)
    }

    /// Coefficients of `1 / den(T)` through `Tⁿ`: the local factor of
    /// `L(F × G, s)`.
    pub fn euler_coeffs(&self, n: usize) -> Vec<S> {
        RationalGF::new(vec![S::one()], self.den.clone())
            .expect("den(0) = 1")
            .series_coeffs(n)
    }
}

/// The local factor via the Hadamard product of two factored spin generating
/// functions. Both seeds must be Satake-mode.
pub fn local_rankin_factor(
    seed_f: &HeckeSeed<f64>,
    seed_g: &HeckeSeed<f64>,
    tol: f64,
) -> Result<LocalRankinFactor<f64>> {
    check_same_prime(seed_f.p(), seed_g.p())?;
    let gf = local_spin_gf_factored(seed_f, tol)
        .map_err(|_| Error::FactorizationMissing)?;
    let gg = local_spin_gf_factored(seed_g, tol)
        .map_err(|_| Error::FactorizationMissing)?;
    let h = hadamard(&gf, &gg, tol)?;
    Ok(LocalRankinFactor {
        p: seed_f.p(),
        gp: h.num().iter().map(|c| c.re).collect(),
        den: h.den().iter().map(|c| c.re).collect(),
        den_roots: h.factored_den().map(|r| r.to_vec()),
    })
}

/// The local factor by symmetric functions: the denominator comes from
/// [`tensor_denominator`] and `g_p` from truncating the product series times
/// it. Needs no factorization, so it stays exact for graded seeds.
pub fn local_rankin_factor_exact<S: SeedScalar>(
    seed_f: &HeckeSeed<S>,
    seed_g: &HeckeSeed<S>,
) -> Result<LocalRankinFactor<S>> {
    local_rankin_factor_exact_to(seed_f, seed_g, 15)
}

/// [`local_rankin_factor_exact`] with `den` and `g_p` reduced modulo
/// `T^{depth+1}`. Enough for Dirichlet coefficients up to `p^depth`, and
/// far cheaper for large primes where only `depth = 1` matters.
pub fn local_rankin_factor_exact_to<S: SeedScalar>(
    seed_f: &HeckeSeed<S>,
    seed_g: &HeckeSeed<S>,
    depth: usize,
) -> Result<LocalRankinFactor<S>> {
    check_same_prime(seed_f.p(), seed_g.p())?;
    let full = depth >= 15;
    let den = tensor_denominator_to(&spin_poly(seed_f), &spin_poly(seed_g), if full { 16 } else { depth });
    let d = if full { 16 } else { depth + 1 };
    let sf = local_spin_gf(seed_f).series_coeffs(d - 1);
    let sg = local_spin_gf(seed_g).series_coeffs(d - 1);
    let prod: Vec<S> = sf.into_iter().zip(sg).map(|(x, y)| x * y).collect();
    let mut gp = poly_mul(&prod, &den);
    gp.truncate(d);
    Ok(LocalRankinFactor {
        p: seed_f.p(),
        gp: trim(gp, 0.0),
        den,
        den_roots: None,
    })
}

fn check_same_prime(p: u64, q: u64) -> Result<()> {
    if p != q {
        return Err(Error::OutOfRange(format!("seeds at different primes {p} and {q}")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{prime_power_values, satake_to_seed, ExactSeed, SatakePair};
    use crate::scalar::{GradedRational, Parity};
    use num_rational::BigRational;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn geometric(alpha: BigRational, mult: usize) -> RationalGF<BigRational> {
        RationalGF::from_factors(vec![q(1, 1)], vec![(alpha, mult)]).unwrap()
    }

    #[test]
    fn series_examples() {
        let g = RationalGF::new(vec![q(1, 1)], vec![q(1, 1), q(-1, 1)]).unwrap();
        assert_eq!(g.series_coeffs(3), vec![q(1, 1); 4]);

        let den = expand_factors(&[(q(1, 1), 4)]);
        let g = RationalGF::new(vec![q(1, 1), q(0, 1), q(-1, 2)], den).unwrap();
        assert_eq!(g.series_coeffs(2), vec![q(1, 1), q(4, 1), q(19, 2)]);

        let g = geometric(q(2, 1), 2);
        assert_eq!(
            g.series_coeffs(3),
            vec![q(1, 1), q(4, 1), q(12, 1), q(32, 1)]
        );
    }

    #[test]
    fn zero_constant_denominator_is_malformed() {
        let err = RationalGF::new(vec![q(1, 1)], vec![q(0, 1), q(1, 1)]).unwrap_err();
        assert!(matches!(err, Error::MalformedDenominator(_)));
    }

    #[test]
    fn hadamard_of_geometric_series() {
        let h = hadamard(&geometric(q(3, 1), 1), &geometric(q(-1, 2), 1), 0.0).unwrap();
        assert_eq!(h.den(), &[q(1, 1), q(3, 2)]);
        assert_eq!(h.num(), &[q(1, 1)]);

        let h = hadamard(&geometric(q(1, 1), 2), &geometric(q(2, 1), 1), 0.0).unwrap();
        assert_eq!(h.den(), expand_factors(&[(q(2, 1), 2)]).as_slice());
        assert_eq!(h.num(), &[q(1, 1)]);
        assert_eq!(h.series_coeffs(3), vec![q(1, 1), q(4, 1), q(12, 1), q(32, 1)]);
    }

    #[test]
    fn hadamard_refuses_without_factorization() {
        let plain = RationalGF::new(vec![q(1, 1)], vec![q(1, 1), q(-1, 1)]).unwrap();
        let err = hadamard(&plain, &geometric(q(2, 1), 1), 0.0).unwrap_err();
        assert!(matches!(err, Error::FactorizationMissing));
    }

    #[test]
    fn hadamard_rejects_improper_fractions() {
        let improper = RationalGF::from_factors(vec![q(1, 1), q(1, 1)], vec![(q(2, 1), 1)]).unwrap();
        let err = hadamard(&improper, &geometric(q(1, 1), 1), 0.0).unwrap_err();
        assert!(matches!(err, Error::ImproperFraction { .. }));
    }

    #[test]
    fn factorization_mismatch_detected() {
        let g = RationalGF::new(vec![q(1, 1)], vec![q(1, 1), q(-1, 1)]).unwrap();
        assert!(g.clone().with_factorization(vec![(q(2, 1), 1)]).is_err());
        assert!(g.with_factorization(vec![(q(1, 1), 1)]).is_ok());
    }

    #[test]
    fn zero_seed_spin_series() {
        let seed = ExactSeed::new(
            7,
            GradedRational::new(q(0, 1), Parity::Odd, 7),
            GradedRational::from_ints(0, 1),
        )
        .unwrap();
        let s = local_spin_gf(&seed).series_coeffs(6);
        let ints = |n| GradedRational::from_ints(n, 1);
        assert_eq!(&s[..5], &[ints(1), ints(0), ints(0), ints(0), ints(-1)]);
        assert_eq!(s, prime_power_values(&seed, 6));
    }

    #[test]
    fn trivial_satake_spin_denominator() {
        let seed = satake_to_seed(&SatakePair::new(0.0, 0.0).unwrap(), 3).unwrap();
        let gf = local_spin_gf_factored(&seed, 1e-9).unwrap();
        let roots = gf.factored_den().unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].1, 4);
        assert!((roots[0].0 - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn degenerate_rankin_factor_has_sixteen_fold_root() {
        let seed = satake_to_seed(&SatakePair::new(0.0, 0.0).unwrap(), 5).unwrap();
        let f = local_rankin_factor(&seed, &seed, 1e-9).unwrap();
        let roots = f.den_roots.as_ref().unwrap();
        assert_eq!(roots.len(), 1);
        assert_eq!(roots[0].1, 16);
        let expected = expand_factors(&[(1.0f64, 16)]);
        for (x, y) in f.den.iter().zip(expected) {
            assert!((x - y).abs() < 1e-6 * y.abs().max(1.0));
        }
        assert!((f.gp[0] - 1.0).abs() < 1e-9);
        assert!(f.gp[1].abs() < 1e-9);
    }

    #[test]
    fn zero_seed_rankin_product_series() {
        let p = 3u64;
        let seed = ExactSeed::new(
            p,
            GradedRational::new(q(0, 1), Parity::Odd, p),
            GradedRational::from_ints(0, 1),
        )
        .unwrap();
        let f = local_rankin_factor_exact(&seed, &seed).unwrap();
        let gf = RationalGF::new(f.gp.clone(), f.den.clone()).unwrap();
        let s = gf.series_coeffs(6);
        let ints = |n, d| GradedRational::from_ints(n, d);
        assert_eq!(
            s,
            vec![ints(1, 1), ints(0, 1), ints(0, 1), ints(0, 1), ints(1, 1), ints(0, 1), ints(1, 9)]
        );
        assert_eq!(f.gp[0], ints(1, 1));
        assert!(f.gp[1].is_zero());
        assert!(f.gp.len() <= 16);
    }

    #[test]
    fn tensor_denominator_of_linear_factors() {
        // (1 − 2T)(1 − 3T) ⊗ (1 − 5T) = (1 − 10T)(1 − 15T)
        let q1 = expand_factors(&[(q(2, 1), 1), (q(3, 1), 1)]);
        let q2 = expand_factors(&[(q(5, 1), 1)]);
        assert_eq!(
            tensor_denominator(&q1, &q2),
            expand_factors(&[(q(10, 1), 1), (q(15, 1), 1)])
        );
    }

    #[test]
    fn generic_rankin_factor_shape() {
        let f = satake_to_seed(&SatakePair::new(0.7, 2.3).unwrap(), 7).unwrap();
        let g = satake_to_seed(&SatakePair::new(1.9, 0.2).unwrap(), 7).unwrap();
        let r = local_rankin_factor(&f, &g, 1e-9).unwrap();
        assert!((r.gp[0] - 1.0).abs() < 1e-12);
        assert!(r.gp[1].abs() < 1e-9);
        assert!(r.gp.len() <= 16);
        assert_eq!(r.den.len(), 17);
    }

    proptest! {
        #[test]
        fn hadamard_matches_coefficientwise_products(
            a in prop::collection::vec((prop_oneof![-3i64..0, 1i64..4], 1usize..3), 1..3),
            b in prop::collection::vec((prop_oneof![-3i64..0, 1i64..4], 1usize..3), 1..3),
            na in prop::collection::vec(-5i64..5, 1..3),
            nb in prop::collection::vec(-5i64..5, 1..3),
        ) {
            let fa = merge_roots(a.into_iter().map(|(r, m)| (q(r, 1), m)), 0.0);
            let fb = merge_roots(b.into_iter().map(|(r, m)| (q(r, 2), m)), 0.0);
            let da: usize = fa.iter().map(|x| x.1).sum();
            let db: usize = fb.iter().map(|x| x.1).sum();
            let mut num_a: Vec<BigRational> = na.into_iter().map(|x| q(x, 1)).collect();
            let mut num_b: Vec<BigRational> = nb.into_iter().map(|x| q(x, 1)).collect();
            num_a.truncate(da);
            num_b.truncate(db);
            let ga = RationalGF::from_factors(num_a, fa).unwrap();
            let gb = RationalGF::from_factors(num_b, fb).unwrap();
            let h = hadamard(&ga, &gb, 0.0).unwrap();
            let sa = ga.series_coeffs(40);
            let sb = gb.series_coeffs(40);
            let sh = h.series_coeffs(40);
            for n in 0..=40 {
                prop_assert_eq!(&sh[n], &(sa[n].clone() * sb[n].clone()));
            }
            prop_assert!(h.num().len() < h.den().len());
        }

        #[test]
        fn exact_and_hadamard_routes_agree(
            t in prop::array::uniform4(0.0f64..PI), pi in 0usize..5,
        ) {
            let p = [2u64, 3, 5, 7, 97][pi];
            let f = satake_to_seed(&SatakePair::new(t[0], t[1]).unwrap(), p).unwrap();
            let g = satake_to_seed(&SatakePair::new(t[2], t[3]).unwrap(), p).unwrap();
            let had = local_rankin_factor(&f, &g, 1e-9).unwrap();
            let sym = local_rankin_factor_exact(&f, &g).unwrap();
            for i in 0..17 {
                let x = had.den.get(i).copied().unwrap_or(0.0);
                let y = sym.den.get(i).copied().unwrap_or(0.0);
                prop_assert!((x - y).abs() <= 1e-8 * (1.0 + y.abs()), "den[{}]: {} vs {}", i, x, y);
            }
            for i in 0..16 {
                let x = had.gp.get(i).copied().unwrap_or(0.0);
                let y = sym.gp.get(i).copied().unwrap_or(0.0);
                prop_assert!((x - y).abs() <= 1e-8 * (1.0 + y.abs()), "gp[{}]: {} vs {}", i, x, y);
            }
        }
    }
}
