use std::collections::{BTreeMap, HashMap};
use std::io::Read;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::table::{EigenSystem, Provenance};
use super::{prime_power_values, HeckeSeed};
use crate::error::{Error, Result};
use crate::primes::is_prime;
use crate::scalar::{GradedRational, Parity};

/// One raw Hecke eigenvalue `μ(pⁿ)` of a weight-`k` form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawEigenRecord {
    pub p: u64,
    pub n: u32,
    #[serde(with = "bigint_string")]
    pub mu: BigInt,
    pub k: u32,
}

impl RawEigenRecord {
    fn check(&self) -> Result<()> {
        let bad = |reason| Error::MalformedRecord {
            p: self.p,
            n: self.n,
            k: self.k,
            reason,
        };
        if self.k < 4 {
            return Err(bad("weight below 4"));
        }
        if self.n < 1 {
            return Err(bad("exponent below 1"));
        }
        if !is_prime(self.p) {
            return Err(bad("p is not prime"));
        }
        Ok(())
    }

    /// Exponent of `p` split off into the rational part: `⌊n(2k−3)/2⌋`.
    fn integral_shift(&self) -> u32 {
        self.n * (2 * self.k - 3) / 2
    }
}

/// `λ(pⁿ) = μ(pⁿ) · p^(−n(2k−3)/2)` in the graded arithmetic.
pub fn normalize(rec: &RawEigenRecord) -> Result<GradedRational> {
    rec.check()?;
    let scale = BigInt::from(rec.p).pow(rec.integral_shift());
    let q = BigRational::new(rec.mu.clone(), scale);
    Ok(GradedRational::new(q, Parity::of(rec.n as u64), rec.p))
}

/// Recovers the integer `μ(pⁿ)` from a normalized value.
pub fn denormalize(value: &GradedRational, p: u64, n: u32, k: u32) -> Result<RawEigenRecord> {
    let mut rec = RawEigenRecord {
        p,
        n,
        mu: BigInt::zero(),
        k,
    };
    rec.check()?;
    let parity_ok = value.is_zero()
        || match Parity::of(n as u64) {
            Parity::Even => value.radicand() == 1,
            Parity::Odd => value.radicand() == p,
        };
    if !parity_ok {
        return Err(Error::MalformedRecord {
            p,
            n,
            k,
            reason: "grading does not match the exponent",
        });
    }
    let scaled = value.q() * BigRational::from_integer(BigInt::from(p).pow(rec.integral_shift()));
    if !scaled.denom().is_one() {
        return Err(Error::MalformedRecord {
            p,
            n,
            k,
            reason: "value does not come from an integral eigenvalue",
        });
    }
    rec.mu = scaled.numer().clone();
    Ok(rec)
}

/// Reads a `p,n,mu,k` CSV. Duplicate `(p, n)` pairs are rejected with the
/// offending line number.
pub fn read_raw_records<R: Read>(reader: R) -> Result<Vec<RawEigenRecord>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| csv_error(&e, 1))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    if names != ["p", "n", "mu", "k"] {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header p,n,mu,k, found {}", names.join(",")),
        });
    }
    let mut seen: HashMap<(u64, u32), u64> = HashMap::new();
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            csv_error(&e, line)
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let field = |i: usize, name: &str| Error::Parse {
            line,
            message: format!(
                "field {name}: cannot parse {:?} as a decimal integer",
                row.get(i).unwrap_or("")
            ),
        };
        let get = |i: usize| row.get(i).unwrap_or("");
        let rec = RawEigenRecord {
            p: get(0).parse().map_err(|_| field(0, "p"))?,
            n: get(1).parse().map_err(|_| field(1, "n"))?,
            mu: get(2).parse().map_err(|_| field(2, "mu"))?,
            k: get(3).parse().map_err(|_| field(3, "k"))?,
        };
        rec.check().map_err(|e| Error::Parse {
            line,
            message: e.to_string(),
        })?;
        if seen.insert((rec.p, rec.n), line).is_some() {
            return Err(Error::DuplicateRecord {
                p: rec.p,
                n: rec.n,
                line,
            });
        }
        out.push(rec);
    }
    Ok(out)
}

fn csv_error(e: &csv::Error, line: u64) -> Error {
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizedRecord {
    #[serde(flatten)]
    pub raw: RawEigenRecord,
    pub lambda: GradedRational,
}

/// A stored record `λ(pⁿ)`, `n ≥ 3`, that disagrees with the recurrence
/// driven by the same prime's seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecordMismatch {
    pub p: u64,
    pub n: u32,
    pub stored: GradedRational,
    pub predicted: GradedRational,
}

/// The normalized content of one ingestion file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IngestedSystem {
    pub weight: u32,
    pub records: Vec<NormalizedRecord>,
    /// Seeds for every prime carrying both `n = 1` and `n = 2` records.
    pub system: EigenSystem<GradedRational>,
    pub mismatches: Vec<RecordMismatch>,
}

impl IngestedSystem {
    pub fn from_records(records: Vec<RawEigenRecord>) -> Result<Self> {
        let weight = records.first().map(|r| r.k).unwrap_or(0);
        if let Some(r) = records.iter().find(|r| r.k != weight) {
            return Err(Error::MalformedRecord {
                p: r.p,
                n: r.n,
                k: r.k,
                reason: "weights differ within one system",
            });
        }
        let mut normalized = Vec::with_capacity(records.len());
        let mut by_prime: BTreeMap<u64, BTreeMap<u32, GradedRational>> = BTreeMap::new();
        for raw in records {
            let lambda = normalize(&raw)?;
            by_prime
                .entry(raw.p)
                .or_default()
                .insert(raw.n, lambda.clone());
            normalized.push(NormalizedRecord { raw, lambda });
        }
        let mut seeds = Vec::new();
        let mut mismatches = Vec::new();
        for (&p, values) in &by_prime {
            let (Some(a), Some(b)) = (values.get(&1), values.get(&2)) else {
                continue;
            };
            let seed = HeckeSeed::new(p, a.clone(), b.clone())?;
            let top = *values.keys().max().expect("nonempty") as usize;
            let predicted = prime_power_values(&seed, top);
            for (&n, stored) in values.range(3..) {
                if predicted[n as usize] != *stored {
                    mismatches.push(RecordMismatch {
                        p,
                        n,
                        stored: stored.clone(),
                        predicted: predicted[n as usize].clone(),
                    });
                }
            }
            seeds.push(seed);
        }
        Ok(Self {
            weight,
            records: normalized,
            system: EigenSystem::new(seeds, Provenance::Ingested)?,
            mismatches,
        })
    }
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(v)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(p: u64, n: u32, mu: i64, k: u32) -> RawEigenRecord {
        RawEigenRecord {
            p,
            n,
            mu: mu.into(),
            k,
        }
    }

    #[test]
    fn normalize_examples() {
        let v = normalize(&rec(2, 2, 1024, 10)).unwrap();
        assert_eq!(v, GradedRational::from_ints(1, 128));
        assert_eq!(v.parity(), Parity::Even);

        let v = normalize(&rec(2, 1, 256, 10)).unwrap();
        assert_eq!(v.parity(), Parity::Odd);
        assert_eq!(v.q(), &BigRational::one());
        assert!((crate::scalar::Scalar::to_f64(&v) - 2f64.powf(-0.5)).abs() < 1e-15);

        assert!(normalize(&rec(3, 1, 0, 20)).unwrap().is_zero());
    }

    #[test]
    fn malformed_records_are_rejected() {
        assert!(matches!(
            normalize(&rec(2, 1, 1, 3)),
            Err(Error::MalformedRecord { .. })
        ));
        assert!(matches!(
            normalize(&rec(2, 0, 1, 10)),
            Err(Error::MalformedRecord { .. })
        ));
        assert!(normalize(&rec(9, 1, 1, 10)).is_err());
    }

    #[test]
    fn denormalize_rejects_non_integral_values() {
        let v = GradedRational::new(BigRational::new(1.into(), 3.into()), Parity::Odd, 2);
        assert!(denormalize(&v, 2, 1, 10).is_err());
        let wrong_parity = GradedRational::from_ints(1, 1);
        assert!(denormalize(&wrong_parity, 2, 1, 10).is_err());
    }

    #[test]
    fn csv_ingestion() {
        let csv = "p,n,mu,k\n2,1,-1440,10\n2,2,0,10\n3,1,0,10\n";
        let recs = read_raw_records(csv.as_bytes()).unwrap();
        assert_eq!(recs.len(), 3);
        let sys = IngestedSystem::from_records(recs).unwrap();
        assert_eq!(sys.records.len(), 3);
        assert_eq!(sys.system.len(), 1);
        assert!(sys.mismatches.is_empty());
        let text = serde_json::to_string(&sys).unwrap();
        let back: IngestedSystem = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sys);
    }

    #[test]
    fn csv_duplicate_names_its_line() {
        let csv = "p,n,mu,k\n2,1,5,10\n3,1,7,10\n2,1,9,10\n";
        match read_raw_records(csv.as_bytes()) {
            Err(Error::DuplicateRecord { p: 2, n: 1, line }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn csv_errors_carry_lines() {
        let bad_header = "p,n,k,mu\n2,1,10,5\n";
        assert!(matches!(
            read_raw_records(bad_header.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
        let bad_field = "p,n,mu,k\n2,1,5,10\n2,x,5,10\n";
        assert!(matches!(
            read_raw_records(bad_field.as_bytes()),
            Err(Error::Parse { line: 3, .. })
        ));
        let bad_weight = "p,n,mu,k\n2,1,5,3\n";
        assert!(matches!(
            read_raw_records(bad_weight.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn higher_records_are_checked_against_the_recurrence() {
        // k = 4: λ(pⁿ) = μ p^{-5n/2}; seed λ(2) = 0, λ(4) = 0 gives λ(2⁴) = −1,
        // i.e. μ(16) = −2^10.
        let recs = vec![
            rec(2, 1, 0, 4),
            rec(2, 2, 0, 4),
            rec(2, 4, -1024, 4),
            rec(2, 6, 7, 4),
        ];
        let sys = IngestedSystem::from_records(recs).unwrap();
        assert_eq!(sys.mismatches.len(), 1);
        assert_eq!(sys.mismatches[0].n, 6);
    }

    proptest! {
        #[test]
        fn normalize_then_denormalize_is_identity(
            pi in 0usize..6, n in 1u32..12, mu in -1_000_000i64..1_000_000, k in 4u32..40,
        ) {
            let p = [2u64, 3, 5, 7, 11, 97][pi];
            let r = rec(p, n, mu, k);
            let v = normalize(&r).unwrap();
            prop_assert_eq!(denormalize(&v, p, n, k).unwrap(), r);
        }
    }
}
