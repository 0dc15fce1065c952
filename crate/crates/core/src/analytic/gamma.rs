use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `B_{2k} / (2k(2k − 1))` for `k = 1..7`.
const STIRLING: [f64; 7] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360360.0,
    1.0 / 156.0,
];

/// `ln Γ(z)` by upward recurrence to `Re z ≥ 12` followed by Stirling's
/// series. The imaginary part is continuous along the shift path, not
/// necessarily the principal branch; the real part is `ln |Γ(z)|`.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    let mut z = z;
    let mut shift = Complex64::new(0.0, 0.0);
    while z.re < 12.0 {
        shift += z.ln();
        z += 1.0;
    }
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut power = inv;
    for c in STIRLING {
        series += power * c;
        power *= inv2;
    }
    (z - 0.5) * z.ln() - z + 0.5 * (2.0 * PI).ln() + series - shift
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GammaKind {
    /// `Γ_R(s) = π^{−s/2} Γ(s/2)`.
    R,
    /// `Γ_C(s) = 2 (2π)^{−s} Γ(s)`.
    C,
}

/// One factor `Γ_kind(s + shift)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaEntry {
    pub kind: GammaKind,
    pub shift: f64,
}

impl GammaEntry {
    /// `ln |Γ_kind(s + shift)|`.
    pub fn ln_abs(&self, s: Complex64) -> f64 {
        let w = s + self.shift;
        match self.kind {
            GammaKind::R => -0.5 * w.re * PI.ln() + ln_gamma(w / 2.0).re,
            GammaKind::C => 2f64.ln() - w.re * (2.0 * PI).ln() + ln_gamma(w).re,
        }
    }
}

/// The archimedean factor `L_∞(F × G, s)` as a product of gamma factors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaFactorList {
    pub k1: u32,
    pub k2: u32,
    pub entries: Vec<GammaEntry>,
}

impl GammaFactorList {
    pub fn shifts(&self, kind: GammaKind) -> Vec<f64> {
        self.entries
            .iter()
            .filter(|e| e.kind == kind)
            .map(|e| e.shift)
            .collect()
    }

    /// `ln |L_∞(s)|`.
    pub fn ln_abs(&self, s: Complex64) -> f64 {
        self.entries.iter().map(|e| e.ln_abs(s)).sum()
    }
}

/// Gamma factors of `L(F × G, s)` for weights `k1 ≥ k2 ≥ 4`.
pub fn gamma_factors(k1: u32, k2: u32) -> Result<GammaFactorList> {
    if k2 < 4 || k1 < k2 {
        return Err(Error::InvalidWeights { k1, k2 });
    }
    let (a, b) = (k1 as f64, k2 as f64);
    let (c_shifts, r_shifts): (Vec<f64>, Vec<f64>) = if k1 > k2 {
        (
            vec![a + b - 3.0, a - b, a - 1.0, a - 2.0, b - 1.0, b - 2.0, 1.0],
            vec![0.0, 1.0],
        )
    } else {
        (
            vec![2.0 * a - 3.0, a - 1.0, a - 1.0, a - 2.0, a - 2.0, 1.0],
            vec![0.0, 0.0, 1.0, 1.0],
        )
    };
    let entries = c_shifts
        .into_iter()
        .map(|shift| GammaEntry {
            kind: GammaKind::C,
            shift,
        })
        .chain(r_shifts.into_iter().map(|shift| GammaEntry {
            kind: GammaKind::R,
            shift,
        }))
        .collect();
    Ok(GammaFactorList { k1, k2, entries })
}

/// `|L_∞(c + it) / L_∞(1 − c − it)|` next to `k₁^{6(2c−1)} |1 + it|^{8(2c−1)}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArchimedeanRatio {
    pub k1: u32,
    pub k2: u32,
    pub c: f64,
    pub t: f64,
    pub ln_value: f64,
    pub ln_bound: f64,
}

impl ArchimedeanRatio {
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }

    pub fn bound(&self) -> f64 {
        self.ln_bound.exp()
    }

    /// `value / bound`, formed in log space.
    pub fn ratio(&self) -> f64 {
        (self.ln_value - self.ln_bound).exp()
    }
}

pub fn archimedean_ratio(k1: u32, k2: u32, c: f64, t: f64) -> Result<ArchimedeanRatio> {
    if !(c > 1.0 && c < 1.5) {
        return Err(Error::OutOfRange(format!("c = {c} outside (1, 3/2)")));
    }
    let factors = gamma_factors(k1, k2)?;
    let ln_value =
        factors.ln_abs(Complex64::new(c, t)) - factors.ln_abs(Complex64::new(1.0 - c, -t));
    let e = 2.0 * c - 1.0;
    let ln_bound = 6.0 * e * (k1 as f64).ln() + 8.0 * e * Complex64::new(1.0, t).norm().ln();
    Ok(ArchimedeanRatio {
        k1,
        k2,
        c,
        t,
        ln_value,
        ln_bound,
    })
}

/// Spread of `value / bound` over a grid of `(k1, k2, c, t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvexityReport {
    pub samples: usize,
    pub mean: f64,
    pub std_dev: f64,
    /// Coefficient of variation `std_dev / mean`.
    pub cv: f64,
    pub min: f64,
    /// The smallest constant `C` with `value ≤ C·bound` on the grid.
    pub fitted_constant: f64,
    pub argmax: Option<ArchimedeanRatio>,
    pub argmin: Option<ArchimedeanRatio>,
}

pub fn convexity_monitor(weights: &[(u32, u32)], cs: &[f64], ts: &[f64]) -> Result<ConvexityReport> {
    let mut samples = Vec::with_capacity(weights.len() * cs.len() * ts.len());
    for &(k1, k2) in weights {
        for &c in cs {
            for &t in ts {
                samples.push(archimedean_ratio(k1, k2, c, t)?);
            }
        }
    }
    let ratios: Vec<f64> = samples.iter().map(ArchimedeanRatio::ratio).collect();
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n;
    let pick = |better: fn(f64, f64) -> bool| {
        samples
            .iter()
            .zip(&ratios)
            .fold(None, |best: Option<(&ArchimedeanRatio, f64)>, (s, &r)| match best {
                Some((_, b)) if !better(r, b) => best,
                _ => Some((s, r)),
            })
    };
    let hi = pick(|r, b| r > b);
    let lo = pick(|r, b| r < b);
    Ok(ConvexityReport {
        samples: samples.len(),
        mean,
        std_dev: var.sqrt(),
        cv: var.sqrt() / mean,
        min: lo.map_or(f64::NAN, |x| x.1),
        fitted_constant: hi.map_or(f64::NAN, |x| x.1),
        argmax: hi.map(|x| *x.0),
        argmin: lo.map(|x| *x.0),
    })
}

/// Edge data for the two-line convexity interpolation on the strip `a ≤ σ ≤ b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RademacherParams {
    pub a: f64,
    pub b: f64,
    pub e: f64,
    pub f: f64,
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl RademacherParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.a < self.b) {
            return Err(Error::OutOfRange(format!("need a < b, got {} and {}", self.a, self.b)));
        }
        if self.p + self.a <= 0.0 {
            return Err(Error::OutOfRange(format!("need P + a > 0, got {}", self.p + self.a)));
        }
        if self.alpha < self.beta {
            return Err(Error::OutOfRange(format!(
                "need alpha >= beta, got {} < {}",
                self.alpha, self.beta
            )));
        }
        if self.e <= 0.0 || self.f <= 0.0 {
            return Err(Error::OutOfRange("edge constants must be positive".into()));
        }
        Ok(())
    }
}

/// `(E|P + s|^α)^{(b−σ)/(b−a)} (F|P + s|^β)^{(σ−a)/(b−a)}` for `a ≤ σ ≤ b`.
pub fn rademacher_bound(params: &RademacherParams, s: Complex64) -> Result<f64> {
    params.validate()?;
    let RademacherParams { a, b, e, f, p, alpha, beta } = *params;
    if !(a..=b).contains(&s.re) {
        return Err(Error::OutOfRange(format!("Re(s) = {} outside [{a}, {b}]", s.re)));
    }
    let w = (b - s.re) / (b - a);
    let ln_mod = (s + p).norm().ln();
    Ok((w * (e.ln() + alpha * ln_mod) + (1.0 - w) * (f.ln() + beta * ln_mod)).exp())
}
