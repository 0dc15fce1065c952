use std::fs;
use std::path::{Path, PathBuf};

use hecke_core::analytic::{
    archimedean_ratio, coeffs_g, coeffs_lfg, coeffs_rankin, g_bound_check, gamma_factors,
    global_identity_check, identity_residual, log_spaced_checkpoints, partial_sum_experiment,
    rankin_factors, rankin_factors_to_cutoff, write_curve_csv, DEFAULT_A,
};
use hecke_core::eigen::{
    extend_multiplicative, prime_power_values, read_raw_records, EigenSystem, ExactSeed, HeckeSeed,
    IngestedSystem, Provenance, SeedScalar,
};
use hecke_core::error::Error as CoreError;
use hecke_core::gf::{local_rankin_factor, local_rankin_factor_exact, local_spin_gf, local_spin_gf_factored};
use hecke_core::nonvanishing::{
    classify_case, replay_draws, sweep_nonvanishing, vanishing_pattern_scan, SeedDraw, SweepConfig,
    SweepMode, Validity,
};
use hecke_core::primes::primes_up_to;
use hecke_core::scalar::GradedRational;
use hecke_core::signs::{
    hypothesis_check, mr_density, prime_sign_estimator, sample_system, sign_census,
    zero_density_report, HFunction,
};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::{Cli, Command, Mode, RunConfig, ValidityArg};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: unrecognized seed file: {source}")]
    SeedFile { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Config(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Core(CoreError::Parse { .. } | CoreError::DuplicateRecord { .. }) => "parse",
            CliError::Core(_) => "domain",
            CliError::Io { .. } => "io",
            CliError::SeedFile { .. } => "seed-file",
            CliError::Config(_) => "config",
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

pub enum Outcome {
    Done(PathBuf),
    Anomaly { report: PathBuf, message: String },
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a Command,
    config: &'a RunConfig,
    input_hash: String,
    result: Value,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_system(path: &Path) -> Result<EigenSystem<GradedRational>> {
    let bytes = read(path)?;
    let bad = |source| CliError::SeedFile {
        path: path.to_path_buf(),
        source,
    };
    let value: Value = serde_json::from_slice(&bytes).map_err(bad)?;
    // An ingestion result, a bare system, a list of seeds or one seed.
    let sys = if value.get("records").is_some() {
        serde_json::from_value::<IngestedSystem>(value).map_err(bad)?.system
    } else if value.get("seeds").is_some() {
        serde_json::from_value(value).map_err(bad)?
    } else if value.is_array() {
        let seeds: Vec<ExactSeed> = serde_json::from_value(value).map_err(bad)?;
        EigenSystem::new(seeds, Provenance::Manual)?
    } else {
        let seed: ExactSeed = serde_json::from_value(value).map_err(bad)?;
        EigenSystem::new([seed], Provenance::Manual)?
    };
    sys.validate()?;
    Ok(sys)
}

fn input_hash(cli: &Cli) -> Result<String> {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(&(&cli.command, &cli.config)).expect("config serializes"));
    for path in cli.command.inputs() {
        h.update(read(path)?);
    }
    Ok(format!("sha256:{}", hex::encode(h.finalize())))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    fs::write(path, text + "\n").map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// The primes a per-prime command reports on.
fn selected<S: SeedScalar>(sys: &EigenSystem<S>, p: Option<u64>, limit: u64) -> Result<Vec<&HeckeSeed<S>>> {
    match p {
        Some(p) => Ok(vec![sys.seed(p).ok_or(CoreError::MissingPrime { p })?]),
        None => Ok(sys.seeds().filter(|s| s.p() <= limit).collect()),
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("results serialize")
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let cfg = &cli.config;
    if cfg.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.workers)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    if !(cfg.tol >= 0.0) {
        return Err(CliError::Config(format!("tolerance {} must be nonnegative", cfg.tol)));
    }
    fs::create_dir_all(&cfg.out).map_err(|source| CliError::Io {
        path: cfg.out.clone(),
        source,
    })?;
    let hash = input_hash(cli)?;
    let name = cli.command.name();
    let (result, anomaly) = dispatch(&cli.command, cfg)?;
    let path = cfg.out.join(format!("{name}.json"));
    write_json(
        &path,
        &Report {
            command: &cli.command,
            config: cfg,
            input_hash: hash,
            result,
        },
    )?;
    Ok(match anomaly {
        Some(message) => Outcome::Anomaly { report: path, message },
        None => Outcome::Done(path),
    })
}

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<(Value, Option<String>)> {
    let float = cfg.mode == Mode::Float;
    match cmd {
        Command::Ingest { csv } => {
            let bytes = read(csv)?;
            let ingested = IngestedSystem::from_records(read_raw_records(bytes.as_slice())?)?;
            let system_path = cfg.out.join("system.json");
            write_json(&system_path, &ingested)?;
            let anomaly = (!ingested.mismatches.is_empty()).then(|| {
                format!("{} stored values disagree with the recurrence", ingested.mismatches.len())
            });
            let result = json!({
                "records": ingested.records.len(),
                "weight": ingested.weight,
                "primes": ingested.system.seeds().map(|s| s.p()).collect::<Vec<_>>(),
                "mismatches": ingested.mismatches,
                "system_file": system_path,
            });
            Ok((result, anomaly))
        }
        Command::Recur { seed_file, n, p } => {
            let sys = load_system(seed_file)?;
            let rows = if float {
                recur_rows(&sys.to_float(), *p, cfg.primes_up_to, *n)?
            } else {
                recur_rows(&sys, *p, cfg.primes_up_to, *n)?
            };
            Ok((Value::Array(rows), None))
        }
        Command::Gf { seed_file, p, terms } => {
            let sys = load_system(seed_file)?;
            let mut rows = Vec::new();
            if float {
                let sys = sys.to_float();
                for seed in selected(&sys, *p, cfg.primes_up_to)? {
                    let gf = local_spin_gf_factored(seed, cfg.tol)?;
                    let series = local_spin_gf(seed).series_coeffs(*terms);
                    rows.push(json!({ "p": seed.p(), "gf": gf, "series": series }));
                }
            } else {
                for seed in selected(&sys, *p, cfg.primes_up_to)? {
                    let gf = local_spin_gf(seed);
                    let series = gf.series_coeffs(*terms);
                    rows.push(json!({ "p": seed.p(), "gf": gf, "series": series }));
                }
            }
            Ok((Value::Array(rows), None))
        }
        Command::Hadamard { f, g, p, depth } => {
            let (sf, sg) = (load_system(f)?, load_system(g)?);
            let mut rows = Vec::new();
            for seed_f in selected(&sf, *p, cfg.primes_up_to)? {
                let q = seed_f.p();
                let seed_g = sg.seed(q).ok_or(CoreError::MissingPrime { p: q })?;
                let row = if float {
                    let (a, b) = (seed_f.to_float(), seed_g.to_float());
                    let factor = local_rankin_factor(&a, &b, cfg.tol)?;
                    let residual = identity_residual(&factor, &a, &b, *depth);
                    json!({ "p": q, "gp_degree": factor.gp_degree(cfg.tol), "identity_residual": residual, "factor": factor })
                } else {
                    let factor = local_rankin_factor_exact(seed_f, seed_g)?;
                    let residual = identity_residual(&factor, seed_f, seed_g, *depth);
                    json!({ "p": q, "gp_degree": factor.gp_degree(0.0), "identity_residual": residual, "factor": factor })
                };
                rows.push(row);
            }
            Ok((Value::Array(rows), None))
        }
        Command::Nonvanish {
            trials,
            validity,
            zero_bias,
            all_zero_fraction,
            max_n,
            sweep_primes,
            replay,
        } => {
            let report = match replay {
                Some(path) => {
                    let draws: Vec<SeedDraw> =
                        serde_json::from_slice(&read(path)?).map_err(|source| CliError::SeedFile {
                            path: path.clone(),
                            source,
                        })?;
                    replay_draws(&draws, *max_n)?
                }
                None => {
                    let sweep = SweepConfig {
                        primes: sweep_primes.clone(),
                        mode: if float { SweepMode::Float } else { SweepMode::Exact },
                        validity: match validity {
                            ValidityArg::Satake => Validity::Satake,
                            ValidityArg::Free => Validity::Free,
                        },
                        zero_bias: *zero_bias,
                        all_zero_fraction: *all_zero_fraction,
                        max_n: *max_n,
                        tol: cfg.tol,
                        ..SweepConfig::default()
                    };
                    sweep_nonvanishing(&sweep, *trials, cfg.seed)?
                }
            };
            let anomaly = if report.anomalies.is_empty() {
                None
            } else {
                let path = cfg.out.join("nonvanish-replay.json");
                write_json(&path, &report.replay_file())?;
                Some(format!(
                    "{} pairs vanish jointly past the bound; replay file {}",
                    report.anomalies.len(),
                    path.display()
                ))
            };
            Ok((to_value(&report), anomaly))
        }
        Command::Scan { seed_file, window, p } => {
            let sys = load_system(seed_file)?;
            let tol = cfg.zero_tol();
            let mut rows = Vec::new();
            let mut bad = Vec::new();
            for seed in selected(&sys, *p, cfg.primes_up_to)? {
                let report = if float {
                    vanishing_pattern_scan(&seed.to_float(), *window, tol)?
                } else {
                    vanishing_pattern_scan(seed, *window, tol)?
                };
                if !report.consistent() {
                    bad.push(seed.p());
                }
                let case = classify_case(seed, seed, tol)?;
                rows.push(json!({ "consistent": report.consistent(), "pattern": report, "case": case.tag }));
            }
            let anomaly = (!bad.is_empty()).then(|| format!("forbidden zero patterns at p = {bad:?}"));
            Ok((Value::Array(rows), anomaly))
        }
        Command::Lseries { f, g, sigma } => {
            let n = cfg.cutoff;
            let (check, float_pair) = match (f, g) {
                (Some(f), Some(g)) => {
                    let (sf, sg) = (load_system(f)?, load_system(g)?);
                    let pair = (sf.to_float(), sg.to_float());
                    let check = if float {
                        lseries_check(&pair.0, &pair.1, n)?
                    } else {
                        lseries_check(&sf, &sg, n)?
                    };
                    (check, pair)
                }
                _ => {
                    let primes = primes_up_to(n.max(2) as u64);
                    let sf = sample_system(&cfg.measure, &primes, cfg.seed)?;
                    let sg = sample_system(&cfg.measure, &primes, cfg.seed.wrapping_add(1))?;
                    (lseries_check(&sf, &sg, n)?, (sf, sg))
                }
            };
            let mut bounds = Vec::new();
            if !sigma.is_empty() {
                let factors = rankin_factors(&float_pair.0, &float_pair.1, cfg.primes_up_to as usize)?;
                for &s in sigma {
                    bounds.push(g_bound_check(&factors, s, DEFAULT_A, 1.0)?);
                }
            }
            let failed = if check.exact {
                false
            } else if float || f.is_none() {
                check.max_scaled_residual > cfg.tol
            } else {
                true
            };
            let anomaly = failed.then(|| {
                format!(
                    "L(F,G) differs from g·L(F×G) at n = {} (scaled residual {:e})",
                    check.worst_n, check.max_scaled_residual
                )
            });
            Ok((json!({ "identity": check, "g_bounds": bounds }), anomaly))
        }
        Command::Gamma { k1, k2, c, t } => {
            let factors = gamma_factors(*k1, *k2)?;
            let ts = if t.is_empty() { vec![0.0] } else { t.clone() };
            let mut ratios = Vec::new();
            for &cc in c {
                for &tt in &ts {
                    let r = archimedean_ratio(*k1, *k2, cc, tt)?;
                    ratios.push(json!({ "c": cc, "t": tt, "ln_value": r.ln_value, "ln_bound": r.ln_bound, "ratio": r.ratio() }));
                }
            }
            Ok((json!({ "entries": factors.entries.len(), "factors": factors, "ratios": ratios }), None))
        }
        Command::Sums { same, points, from } => {
            let n = cfg.cutoff;
            let (tf, tg) = sampled_tables(cfg, *same)?;
            let report = partial_sum_experiment(&tf, &tg, &log_spaced_checkpoints(*from, n, *points))?;
            let csv_path = cfg.out.join("sums.csv");
            let file = fs::File::create(&csv_path).map_err(|source| CliError::Io {
                path: csv_path.clone(),
                source,
            })?;
            write_curve_csv(&report, file)?;
            Ok((json!({ "report": report, "curve_file": csv_path }), None))
        }
        Command::Signs { c, fraction, delta } => {
            let x = cfg.cutoff;
            let (tf, tg) = sampled_tables(cfg, false)?;
            let census = sign_census(&tf, &tg, x, cfg.tol)?;
            let prime_signs = prime_sign_estimator(&tf, &tg, x, cfg.tol)?;
            let hypothesis = hypothesis_check(&tg, *c, x, *fraction)?;
            let zeros = zero_density_report(&tg, x, *delta, cfg.tol)?;
            let density = mr_density(&HFunction::nonvanishing(&tf, &tg, cfg.tol), cfg.primes_up_to);
            Ok((
                json!({
                    "census": census,
                    "positive_fraction": census.positive_fraction(),
                    "prime_signs": prime_signs,
                    "prime_sign_bounds_hold": prime_signs.bounds_hold(),
                    "hypothesis": hypothesis,
                    "zero_density": zeros,
                    "nonvanishing_density": density,
                }),
                None,
            ))
        }
    }
}

fn recur_rows<S: SeedScalar + Serialize>(
    sys: &EigenSystem<S>,
    p: Option<u64>,
    limit: u64,
    n: usize,
) -> Result<Vec<Value>> {
    Ok(selected(sys, p, limit)?
        .into_iter()
        .map(|seed| json!({ "p": seed.p(), "values": prime_power_values(seed, n) }))
        .collect())
}

fn lseries_check<S: SeedScalar>(
    sf: &EigenSystem<S>,
    sg: &EigenSystem<S>,
    n: usize,
) -> Result<hecke_core::analytic::IdentityCheck> {
    let lfg = coeffs_lfg(&extend_multiplicative(sf, n)?, &extend_multiplicative(sg, n)?)?;
    let factors = rankin_factors_to_cutoff(sf, sg, n)?;
    Ok(global_identity_check(&lfg, &coeffs_g(&factors, n)?, &coeffs_rankin(&factors, n)?)?)
}

/// F from the root seed, G from the next one, both over every prime up to
/// the cutoff and extended multiplicatively.
fn sampled_tables(
    cfg: &RunConfig,
    same: bool,
) -> Result<(hecke_core::eigen::EigenTable<f64>, hecke_core::eigen::EigenTable<f64>)> {
    let n = cfg.cutoff;
    let primes = primes_up_to(n.max(2) as u64);
    let sf = sample_system(&cfg.measure, &primes, cfg.seed)?;
    let tf = extend_multiplicative(&sf, n)?;
    let tg = if same {
        tf.clone()
    } else {
        extend_multiplicative(&sample_system(&cfg.measure, &primes, cfg.seed.wrapping_add(1))?, n)?
    };
    Ok((tf, tg))
}
