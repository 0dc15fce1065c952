use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{prime_power_values, HeckeSeed, SeedScalar};
use crate::error::{Error, Result};
use crate::primes::{peel_smallest, smallest_prime_factors};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Ingested,
    SatakeSampled,
    Manual,
}

/// Per-prime seeds of one eigenform.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem<S> {
    seeds: BTreeMap<u64, HeckeSeed<S>>,
    provenance: Provenance,
}

impl<S: SeedScalar> EigenSystem<S> {
    pub fn new(seeds: impl IntoIterator<Item = HeckeSeed<S>>, provenance: Provenance) -> Result<Self> {
        let mut map = BTreeMap::new();
        for seed in seeds {
            let p = seed.p();
            if map.insert(p, seed).is_some() {
                return Err(Error::OutOfRange(format!("prime {p} seeded twice")));
            }
        }
        Ok(Self {
            seeds: map,
            provenance,
        })
    }

    /// Checks key/seed agreement and seed validity, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        for (&p, seed) in &self.seeds {
            seed.validate()?;
            if seed.p() != p {
                return Err(Error::OutOfRange(format!(
                    "seed for {} stored under key {p}",
                    seed.p()
                )));
            }
        }
        Ok(())
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn seed(&self, p: u64) -> Option<&HeckeSeed<S>> {
        self.seeds.get(&p)
    }

    pub fn seeds(&self) -> impl Iterator<Item = &HeckeSeed<S>> {
        self.seeds.values()
    }

    pub fn len(&self) -> usize {
        self.seeds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seeds.is_empty()
    }

    pub fn to_float(&self) -> EigenSystem<f64> {
        EigenSystem {
            seeds: self.seeds.iter().map(|(&p, s)| (p, s.to_float())).collect(),
            provenance: self.provenance,
        }
    }
}

/// `λ(n)` for `1 ≤ n ≤ cutoff`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenTable<S> {
    cutoff: usize,
    /// `values[n - 1] = λ(n)`.
    values: Vec<S>,
}

impl<S> EigenTable<S> {
    pub fn from_values(values: Vec<S>) -> Self {
        Self {
            cutoff: values.len(),
            values,
        }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `λ(n)`; panics outside `1..=cutoff`.
    pub fn get(&self, n: usize) -> &S {
        assert!(n >= 1 && n <= self.cutoff, "index {n} outside 1..={}", self.cutoff);
        &self.values[n - 1]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// `(n, λ(n))` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &S)> {
        self.values.iter().enumerate().map(|(i, v)| (i + 1, v))
    }
}

/// Extends per-prime seeds to `λ(n) = Π λ(p^{v_p(n)})` for `n ≤ cutoff`.
pub fn extend_multiplicative<S: SeedScalar>(
    sys: &EigenSystem<S>,
    cutoff: usize,
) -> Result<EigenTable<S>> {
    let spf = smallest_prime_factors(cutoff);
    // local values λ(p^e) for each prime ≤ cutoff
    let mut local: BTreeMap<u64, Vec<S>> = BTreeMap::new();
    for p in 2..=cutoff {
        if spf[p] as usize != p {
            continue;
        }
        let seed = sys.seed(p as u64).ok_or(Error::MissingPrime { p: p as u64 })?;
        let mut top = 0usize;
        let mut pk = 1usize;
        while pk <= cutoff / p {
            pk *= p;
            top += 1;
        }
        local.insert(p as u64, prime_power_values(seed, top.max(1)));
    }
    let mut values: Vec<S> = Vec::with_capacity(cutoff);
    if cutoff >= 1 {
        values.push(S::one());
    }
    for n in 2..=cutoff {
        let (p, e, m) = peel_smallest(n, &spf);
        let pe = local[&p][e as usize].clone();
        let v = if m == 1 {
            pe
        } else {
            pe * values[m - 1].clone()
        };
        values.push(v);
    }
    Ok(EigenTable { cutoff, values })
}
