use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::eigen::SatakePair;
use crate::error::{Error, Result};

/// Density weights on `(θ₁, θ₂) ∈ [0, π]²`, relative to Lebesgue measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weight {
    /// The Haar image on conjugacy classes of `USp(4)`:
    /// `(cos θ₁ − cos θ₂)² sin²θ₁ sin²θ₂`. Under it `E[λ(p)²] = 1`.
    SatoTate,
    /// Independent semicircle angles: `sin²θ₁ sin²θ₂`.
    Sin2,
}

impl Weight {
    fn density(self, t1: f64, t2: f64) -> f64 {
        let s = (t1.sin() * t2.sin()).powi(2);
        match self {
            Weight::SatoTate => (t1.cos() - t2.cos()).powi(2) * s,
            Weight::Sin2 => s,
        }
    }

    fn sup(self) -> f64 {
        match self {
            Weight::SatoTate => 4.0,
            Weight::Sin2 => 1.0,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Weight::SatoTate => "sato-tate",
            Weight::Sin2 => "sin2",
        }
    }
}

/// Distribution of the Satake angles at each prime.
///
/// Text form, as accepted by [`FromStr`]: `uniform`, `weighted:sato-tate`,
/// `weighted:sin2`, `pinned:θ₁,θ₂` and `atom:θ₁,θ₂,q[@base]`. Angles may be
/// written as decimals or as `pi`, `pi/k`, `x*pi`.
#[derive(Clone, Debug, PartialEq)]
pub enum SamplingMeasure {
    Uniform,
    Weighted(Weight),
    Pinned(SatakePair),
    /// Mass `q` at `at`, the rest distributed as `base`.
    Atom {
        at: SatakePair,
        mass: f64,
        base: Box<SamplingMeasure>,
    },
}

impl SamplingMeasure {
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> SatakePair {
        match self {
            SamplingMeasure::Uniform => SatakePair {
                theta1: rng.random_range(0.0..=PI),
                theta2: rng.random_range(0.0..=PI),
            },
            SamplingMeasure::Weighted(w) => loop {
                let t1 = rng.random_range(0.0..=PI);
                let t2 = rng.random_range(0.0..=PI);
                if rng.random::<f64>() * w.sup() < w.density(t1, t2) {
                    break SatakePair { theta1: t1, theta2: t2 };
                }
            },
            SamplingMeasure::Pinned(sp) => *sp,
            SamplingMeasure::Atom { at, mass, base } => {
                if rng.random::<f64>() < *mass {
                    *at
                } else {
                    base.sample(rng)
                }
            }
        }
    }
}

fn parse_angle(s: &str) -> Option<f64> {
    let s = s.trim();
    if s == "pi" {
        return Some(PI);
    }
    if let Some(k) = s.strip_prefix("pi/") {
        return k.parse::<f64>().ok().map(|k| PI / k);
    }
    if let Some(x) = s.strip_suffix("*pi") {
        return x.parse::<f64>().ok().map(|x| x * PI);
    }
    s.parse().ok()
}

fn parse_pair(a: &str, b: &str) -> Result<SatakePair> {
    let bad = |s: &str| Error::OutOfRange(format!("bad angle `{s}`"));
    SatakePair::new(parse_angle(a).ok_or_else(|| bad(a))?, parse_angle(b).ok_or_else(|| bad(b))?)
}

impl FromStr for SamplingMeasure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::OutOfRange(format!("unknown sampling measure `{s}`"));
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        match kind {
            "uniform" if rest.is_empty() => Ok(SamplingMeasure::Uniform),
            "weighted" => match rest {
                "sato-tate" => Ok(SamplingMeasure::Weighted(Weight::SatoTate)),
                "sin2" => Ok(SamplingMeasure::Weighted(Weight::Sin2)),
                _ => Err(bad()),
            },
            "pinned" => {
                let (a, b) = rest.split_once(',').ok_or_else(bad)?;
                Ok(SamplingMeasure::Pinned(parse_pair(a, b)?))
            }
            "atom" => {
                let (params, base) = match rest.split_once('@') {
                    Some((p, b)) => (p, b.parse()?),
                    None => (rest, SamplingMeasure::Uniform),
                };
                let parts: Vec<&str> = params.split(',').collect();
                let [a, b, q] = parts[..] else {
                    return Err(bad());
                };
                let mass: f64 = q.trim().parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&mass) {
                    return Err(Error::OutOfRange(format!("atom mass {mass} outside [0, 1]")));
                }
                Ok(SamplingMeasure::Atom {
                    at: parse_pair(a, b)?,
                    mass,
                    base: Box::new(base),
                })
            }
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for SamplingMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingMeasure::Uniform => write!(f, "uniform"),
            SamplingMeasure::Weighted(w) => write!(f, "weighted:{}", w.name()),
            SamplingMeasure::Pinned(sp) => write!(f, "pinned:{},{}", sp.theta1, sp.theta2),
            SamplingMeasure::Atom { at, mass, base } => {
                write!(f, "atom:{},{},{}@{}", at.theta1, at.theta2, mass, base)
            }
        }
    }
}

impl Serialize for SamplingMeasure {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SamplingMeasure {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
