use std::collections::BTreeMap;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{first_joint_nonvanishing, CaseTag, Classification, THEOREM_BOUND};
use crate::eigen::{prime_power_values, ExactSeed, HeckeSeed};
use crate::error::{Error, Result};
use crate::primes::is_prime;
use crate::scalar::{GradedRational, Parity, Scalar};

const SHARD: u64 = 2048;
const SATAKE_TOL: f64 = 1e-12;
const MAX_REJECTIONS: usize = 10_000;
/// Denominators of the exact sampling grid.
const GRID_DENS: [i64; 7] = [1, 2, 3, 4, 5, 6, 8];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepMode {
    /// Seeds on a rational / half-integral-power grid, tested exactly.
    Exact,
    /// Continuous float seeds; pairs with a near-zero product are re-tested
    /// exactly on the rationals the floats represent.
    Float,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Validity {
    /// Both seeds satisfy the Satake constraints.
    Satake,
    /// Any seed in the box `|λ(p)| ≤ 4`, `|λ(p²)| ≤ 14`.
    Free,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub primes: Vec<u64>,
    pub mode: SweepMode,
    pub validity: Validity,
    /// Probability that each of `λ(p)`, `λ(p²)` is drawn as exactly zero.
    pub zero_bias: f64,
    /// Fraction of trials replaced by the pair of zero seeds.
    pub all_zero_fraction: f64,
    pub max_n: usize,
    /// Float zero tolerance.
    pub tol: f64,
    /// Float products below this magnitude force an exact re-test.
    pub escalation_threshold: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            primes: vec![2, 3, 5, 7, 97],
            mode: SweepMode::Exact,
            validity: Validity::Satake,
            zero_bias: 0.5,
            all_zero_fraction: 0.0,
            max_n: THEOREM_BOUND,
            tol: 1e-9,
            escalation_threshold: 1e-6,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.primes.is_empty() {
            return Err(Error::OutOfRange("no primes to sweep".into()));
        }
        if let Some(&p) = self.primes.iter().find(|&&p| !is_prime(p)) {
            return Err(Error::NotPrime(p));
        }
        for (name, x) in [("zero_bias", self.zero_bias), ("all_zero_fraction", self.all_zero_fraction)] {
            if !(0.0..=1.0).contains(&x) {
                return Err(Error::OutOfRange(format!("{name} = {x} outside [0, 1]")));
            }
        }
        if self.max_n < THEOREM_BOUND {
            return Err(Error::OutOfRange(format!(
                "max_n = {} is below {THEOREM_BOUND}",
                self.max_n
            )));
        }
        Ok(())
    }
}

/// One sampled pair, in the replay-file format.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedDraw {
    pub f: ExactSeed,
    pub g: ExactSeed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Anomaly {
    #[serde(flatten)]
    pub draw: SeedDraw,
    pub case: CaseTag,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseStats {
    pub count: u64,
    pub max_index: usize,
    /// Pairs whose index exceeded the case's predicted bound.
    pub over_bound: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct NonvanishReport {
    pub trials: u64,
    /// First joint non-vanishing index → count.
    pub histogram: BTreeMap<usize, u64>,
    pub max_index: Option<usize>,
    pub by_case: BTreeMap<CaseTag, CaseStats>,
    pub by_prime: BTreeMap<u64, usize>,
    /// Pairs re-tested exactly after a near-zero float product.
    pub escalations: u64,
    pub anomalies: Vec<Anomaly>,
}

impl NonvanishReport {
    fn record(&mut self, p: u64, case: Classification, index: Option<usize>, draw: impl FnOnce() -> SeedDraw) {
        self.trials += 1;
        let stats = self.by_case.entry(case.tag).or_default();
        stats.count += 1;
        match index {
            Some(n) if n <= THEOREM_BOUND => {
                *self.histogram.entry(n).or_default() += 1;
                self.max_index = self.max_index.max(Some(n));
                stats.max_index = stats.max_index.max(n);
                if n > case.tag.predicted_bound() {
                    stats.over_bound += 1;
                }
                let best = self.by_prime.entry(p).or_default();
                *best = (*best).max(n);
            }
            _ => {
                stats.over_bound += 1;
                self.anomalies.push(Anomaly {
                    draw: draw(),
                    case: case.tag,
                });
            }
        }
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.trials += other.trials;
        for (n, c) in other.histogram {
            *self.histogram.entry(n).or_default() += c;
        }
        self.max_index = self.max_index.max(other.max_index);
        for (tag, s) in other.by_case {
            let mine = self.by_case.entry(tag).or_default();
            mine.count += s.count;
            mine.max_index = mine.max_index.max(s.max_index);
            mine.over_bound += s.over_bound;
        }
        for (p, m) in other.by_prime {
            let best = self.by_prime.entry(p).or_default();
            *best = (*best).max(m);
        }
        self.escalations += other.escalations;
        self.anomalies.extend(other.anomalies);
        self
    }

    pub fn over_bound(&self) -> u64 {
        self.by_case.values().map(|s| s.over_bound).sum()
    }

    pub fn replay_file(&self) -> Vec<SeedDraw> {
        self.anomalies.iter().map(|a| a.draw.clone()).collect()
    }
}

fn zero_seed(p: u64) -> ExactSeed {
    ExactSeed::new(p, GradedRational::from_ints(0, 1), GradedRational::from_ints(0, 1))
        .expect("zero seed is valid at any prime")
}

fn grid_value(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> Option<BigRational> {
    let d = GRID_DENS[rng.random_range(0..GRID_DENS.len())];
    let (jlo, jhi) = ((lo * d as f64).ceil() as i64, (hi * d as f64).floor() as i64);
    (jlo <= jhi).then(|| BigRational::new(rng.random_range(jlo..=jhi).into(), d.into()))
}

/// The range of `λ(p²)` over Satake seeds with the given `λ(p) = u + v`:
/// `uv` runs from `2|a| − 4` up to `a²/4`.
fn satake_b_range(a: f64, p: u64) -> (f64, f64) {
    let shift = 2.0 + 1.0 / p as f64;
    (0.75 * a * a - shift, a * a - 2.0 * a.abs() + 4.0 - shift)
}

fn exact_candidate(rng: &mut ChaCha8Rng, p: u64, cfg: &SweepConfig) -> Option<ExactSeed> {
    let a = if rng.random_bool(cfg.zero_bias) {
        GradedRational::from_ints(0, 1)
    } else if rng.random_bool(0.5) {
        // q·p^(−1/2) with |q·p^(−1/2)| ≤ 4
        let bound = 4.0 * (p as f64).sqrt();
        GradedRational::new(grid_value(rng, -bound, bound)?, Parity::Odd, p)
    } else {
        GradedRational::rational(grid_value(rng, -4.0, 4.0)?)
    };
    let (b_lo, b_hi) = match cfg.validity {
        Validity::Satake => satake_b_range(a.to_f64(), p),
        Validity::Free => (-14.0, 14.0),
    };
    let b = if rng.random_bool(cfg.zero_bias) {
        GradedRational::from_ints(0, 1)
    } else {
        GradedRational::rational(grid_value(rng, b_lo, b_hi)?)
    };
    ExactSeed::new(p, a, b).ok()
}

fn float_candidate(rng: &mut ChaCha8Rng, p: u64, cfg: &SweepConfig) -> Option<ExactSeed> {
    let zero_bias = cfg.zero_bias;
    let mut draw = |lo: f64, hi: f64| {
        if rng.random_bool(zero_bias) {
            0.0
        } else {
            rng.random_range(lo..=hi)
        }
    };
    let a = draw(-4.0, 4.0);
    let (b_lo, b_hi) = match cfg.validity {
        Validity::Satake => satake_b_range(a, p),
        Validity::Free => (-14.0, 14.0),
    };
    let b = if b_lo <= b_hi { draw(b_lo, b_hi) } else { return None };
    let exact = |x: f64| GradedRational::rational(BigRational::from_float(x).expect("finite"));
    ExactSeed::new(p, exact(a), exact(b)).ok()
}

fn sample_seed(rng: &mut ChaCha8Rng, p: u64, cfg: &SweepConfig) -> ExactSeed {
    for _ in 0..MAX_REJECTIONS {
        let candidate = match cfg.mode {
            SweepMode::Exact => exact_candidate(rng, p, cfg),
            SweepMode::Float => float_candidate(rng, p, cfg),
        };
        let Some(seed) = candidate else { continue };
        if cfg.validity == Validity::Free || seed.check_satake(SATAKE_TOL).is_ok() {
            return seed;
        }
    }
    zero_seed(p)
}

fn evaluate_draw(draw: &SeedDraw, cfg: &SweepConfig, report: &mut NonvanishReport) -> Result<()> {
    let p = draw.f.p();
    let exact = |report: &mut NonvanishReport| -> Result<()> {
        let w = first_joint_nonvanishing(&draw.f, &draw.g, cfg.max_n, 0.0)?;
        report.record(p, w.case, w.index, || draw.clone());
        Ok(())
    };
    match cfg.mode {
        SweepMode::Exact => exact(report),
        SweepMode::Float => {
            let (f, g) = (draw.f.to_float(), draw.g.to_float());
            let w = first_joint_nonvanishing(&f, &g, cfg.max_n, cfg.tol)?;
            let last = w.index.unwrap_or(cfg.max_n);
            if near_zero_before(&f, &g, last, cfg.escalation_threshold) {
                report.escalations += 1;
                exact(report)
            } else {
                report.record(p, w.case, w.index, || draw.clone());
                Ok(())
            }
        }
    }
}

fn near_zero_before(f: &HeckeSeed<f64>, g: &HeckeSeed<f64>, last: usize, threshold: f64) -> bool {
    let vf = prime_power_values(f, last);
    let vg = prime_power_values(g, last);
    let near = |x: f64| x.abs() < threshold;
    near(*f.lam_p()) || near(*f.lam_p2()) || near(*g.lam_p()) || near(*g.lam_p2())
        || (1..=last).any(|n| near(vf[n] * vg[n]))
}

fn run_shard(cfg: &SweepConfig, rng_seed: u64, shard: u64, trials: u64) -> Result<NonvanishReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(shard);
    let mut report = NonvanishReport::default();
    for _ in 0..trials {
        let p = cfg.primes[rng.random_range(0..cfg.primes.len())];
        let draw = if rng.random_bool(cfg.all_zero_fraction) {
            SeedDraw {
                f: zero_seed(p),
                g: zero_seed(p),
            }
        } else {
            SeedDraw {
                f: sample_seed(&mut rng, p, cfg),
                g: sample_seed(&mut rng, p, cfg),
            }
        };
        evaluate_draw(&draw, cfg, &mut report)?;
    }
    Ok(report)
}

/// Samples `trials` pairs and records where each first stops vanishing.
///
/// Trials are split into fixed-size shards, each driven by its own stream of
/// the root seed, so the report does not depend on the thread count.
pub fn sweep_nonvanishing(cfg: &SweepConfig, trials: u64, rng_seed: u64) -> Result<NonvanishReport> {
    if trials == 0 {
        return Ok(NonvanishReport::default());
    }
    cfg.validate()?;
    let shards = trials.div_ceil(SHARD);
    let reports: Vec<NonvanishReport> = (0..shards)
        .into_par_iter()
        .map(|s| run_shard(cfg, rng_seed, s, SHARD.min(trials - s * SHARD)))
        .collect::<Result<_>>()?;
    Ok(reports
        .into_iter()
        .fold(NonvanishReport::default(), NonvanishReport::merge))
}

/// Re-evaluates a list of pairs, e.g. a replay file, in exact arithmetic.
pub fn replay_draws(draws: &[SeedDraw], max_n: usize) -> Result<NonvanishReport> {
    let cfg = SweepConfig {
        max_n,
        ..SweepConfig::default()
    };
    let mut report = NonvanishReport::default();
    for d in draws {
        d.f.validate()?;
        d.g.validate()?;
        evaluate_draw(d, &cfg, &mut report)?;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_sweep() {
        let r = sweep_nonvanishing(&SweepConfig::default(), 0, 1).unwrap();
        assert_eq!(r, NonvanishReport::default());
    }

    #[test]
    fn deterministic_across_runs() {
        let cfg = SweepConfig::default();
        let a = sweep_nonvanishing(&cfg, 5000, 11).unwrap();
        let b = sweep_nonvanishing(&cfg, 5000, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials, 5000);
    }

    #[test]
    fn injected_zero_pairs_land_on_four() {
        let cfg = SweepConfig {
            all_zero_fraction: 1.0,
            ..SweepConfig::default()
        };
        let r = sweep_nonvanishing(&cfg, 300, 3).unwrap();
        assert_eq!(r.histogram.get(&4), Some(&300));
        assert_eq!(r.by_case[&CaseTag::AllZero].count, 300);
    }

    #[test]
    fn exact_sweep_reaches_the_nontrivial_cases() {
        let r = sweep_nonvanishing(&SweepConfig::default(), 20_000, 5).unwrap();
        assert!(r.anomalies.is_empty());
        assert!(r.max_index.unwrap() <= THEOREM_BOUND);
        for tag in [
            CaseTag::Trivial,
            CaseTag::AllZero,
            CaseTag::FZeroG2Nonzero,
            CaseTag::FZeroG1Nonzero,
            CaseTag::MixedF2G1,
        ] {
            assert!(r.by_case.get(&tag).is_some_and(|s| s.count > 0), "{tag:?}");
        }
        assert_eq!(r.over_bound(), 0);
    }

    #[test]
    fn float_and_free_modes_run() {
        for (mode, validity) in [
            (SweepMode::Float, Validity::Satake),
            (SweepMode::Exact, Validity::Free),
            (SweepMode::Float, Validity::Free),
        ] {
            let cfg = SweepConfig {
                mode,
                validity,
                ..SweepConfig::default()
            };
            let r = sweep_nonvanishing(&cfg, 3000, 9).unwrap();
            assert!(r.anomalies.is_empty(), "{mode:?} {validity:?}");
            assert_eq!(r.over_bound(), 0, "{mode:?} {validity:?}");
        }
    }

    #[test]
    fn replay_round_trip() {
        let draws = vec![SeedDraw {
            f: zero_seed(7),
            g: zero_seed(7),
        }];
        let json = serde_json::to_string(&draws).unwrap();
        let back: Vec<SeedDraw> = serde_json::from_str(&json).unwrap();
        let r = replay_draws(&back, 14).unwrap();
        assert_eq!(r.histogram.get(&4), Some(&1));
    }

    #[test]
    fn bad_config_rejected() {
        let cfg = SweepConfig {
            primes: vec![4],
            ..SweepConfig::default()
        };
        assert!(sweep_nonvanishing(&cfg, 10, 0).is_err());
    }
}
