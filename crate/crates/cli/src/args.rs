use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hecke_core::signs::SamplingMeasure;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "hecke", version, about = "Hecke eigenvalue recurrences, Rankin–Selberg factors and sign statistics")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Float,
}

/// Settings shared by every subcommand. Each flag can also be set through
/// the matching `HECKE_*` environment variable; the flag wins.
#[derive(Args, Clone, Debug, Serialize)]
pub struct RunConfig {
    /// Arithmetic for seed files: graded rationals or binary64.
    #[arg(long, global = true, value_enum, default_value = "exact", env = "HECKE_MODE")]
    pub mode: Mode,
    /// Zero tolerance, applied in float mode only.
    #[arg(long, global = true, default_value_t = 1e-9, env = "HECKE_TOL")]
    pub tol: f64,
    /// Largest prime used for per-prime reports.
    #[arg(long, global = true, default_value_t = 100, env = "HECKE_PRIMES_UP_TO")]
    pub primes_up_to: u64,
    /// Series cutoff N for Dirichlet coefficients and partial sums.
    #[arg(long, global = true, default_value_t = 1000, env = "HECKE_CUTOFF")]
    pub cutoff: usize,
    /// Root seed for every random draw.
    #[arg(long, global = true, default_value_t = 0, env = "HECKE_SEED")]
    pub seed: u64,
    /// Satake-angle distribution for sampled systems.
    #[arg(long, global = true, default_value = "uniform", env = "HECKE_MEASURE")]
    pub measure: SamplingMeasure,
    /// Directory receiving reports, CSV curves and replay files.
    #[arg(long, global = true, default_value = ".", env = "HECKE_OUT")]
    pub out: PathBuf,
    /// Worker threads; 0 uses one per core.
    #[arg(long, global = true, default_value_t = 0, env = "HECKE_WORKERS")]
    pub workers: usize,
}

impl RunConfig {
    pub fn zero_tol(&self) -> f64 {
        match self.mode {
            Mode::Exact => 0.0,
            Mode::Float => self.tol,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValidityArg {
    Satake,
    Free,
}

#[derive(Subcommand, Debug, Clone, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Normalize a `p,n,mu,k` CSV into a seed file.
    Ingest { csv: PathBuf },
    /// λ(pⁿ) for n = 0..=N from a seed file.
    Recur {
        #[arg(long)]
        seed_file: PathBuf,
        #[arg(long, default_value_t = 14)]
        n: usize,
        /// Restrict to one prime.
        #[arg(long)]
        p: Option<u64>,
    },
    /// The local spin generating function and its first terms.
    Gf {
        #[arg(long)]
        seed_file: PathBuf,
        #[arg(long)]
        p: Option<u64>,
        #[arg(long, default_value_t = 16)]
        terms: usize,
    },
    /// Local Rankin–Selberg factors g_p / den_p for two seed files.
    Hadamard {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        p: Option<u64>,
        /// Number of terms compared in the identity residual.
        #[arg(long, default_value_t = 40)]
        depth: usize,
    },
    /// Randomized joint non-vanishing sweep, or replay of a saved file.
    Nonvanish {
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, value_enum, default_value = "satake")]
        validity: ValidityArg,
        #[arg(long, default_value_t = 0.5)]
        zero_bias: f64,
        #[arg(long, default_value_t = 0.0)]
        all_zero_fraction: f64,
        #[arg(long, default_value_t = 14)]
        max_n: usize,
        /// Comma-separated primes to draw from.
        #[arg(long, value_delimiter = ',', default_value = "2,3,5,7,97")]
        sweep_primes: Vec<u64>,
        /// Re-evaluate the pairs in a replay file instead of sampling.
        #[arg(long)]
        replay: Option<PathBuf>,
    },
    /// Zero patterns of λ(pⁿ) in a window of exponents.
    Scan {
        #[arg(long)]
        seed_file: PathBuf,
        #[arg(long, default_value_t = 40)]
        window: usize,
        #[arg(long)]
        p: Option<u64>,
    },
    /// Dirichlet coefficients of L(F,G), g and L(F×G) and the global identity.
    Lseries {
        /// Seed file for F; without --f/--g both systems are sampled.
        #[arg(long, requires = "g")]
        f: Option<PathBuf>,
        #[arg(long, requires = "f")]
        g: Option<PathBuf>,
        /// Evaluate the truncated |g(σ)| bound at these σ.
        #[arg(long, value_delimiter = ',')]
        sigma: Vec<f64>,
    },
    /// Gamma factor list for weights (k1, k2), with optional ratios.
    Gamma {
        #[arg(long)]
        k1: u32,
        #[arg(long)]
        k2: u32,
        #[arg(long, value_delimiter = ',')]
        c: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        t: Vec<f64>,
    },
    /// Partial sums Σ λ_F(n)λ_G(n) for sampled systems.
    Sums {
        /// Use F = G.
        #[arg(long)]
        same: bool,
        #[arg(long, default_value_t = 25)]
        points: usize,
        #[arg(long, default_value_t = 10)]
        from: usize,
    },
    /// Sign census, prime-sign bounds and the density hypothesis.
    Signs {
        #[arg(long, default_value_t = 0.1)]
        c: f64,
        #[arg(long, default_value_t = hecke_core::signs::HYPOTHESIS_FRACTION)]
        fraction: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Ingest { .. } => "ingest",
            Command::Recur { .. } => "recur",
            Command::Gf { .. } => "gf",
            Command::Hadamard { .. } => "hadamard",
            Command::Nonvanish { .. } => "nonvanish",
            Command::Scan { .. } => "scan",
            Command::Lseries { .. } => "lseries",
            Command::Gamma { .. } => "gamma",
            Command::Sums { .. } => "sums",
            Command::Signs { .. } => "signs",
        }
    }

    /// Files whose contents feed the report hash.
    pub fn inputs(&self) -> Vec<&PathBuf> {
        match self {
            Command::Ingest { csv } => vec![csv],
            Command::Recur { seed_file, .. } | Command::Gf { seed_file, .. } | Command::Scan { seed_file, .. } => {
                vec![seed_file]
            }
            Command::Hadamard { f, g, .. } => vec![f, g],
            Command::Nonvanish { replay, .. } => replay.iter().collect(),
            Command::Lseries { f, g, .. } => f.iter().chain(g.iter()).collect(),
            Command::Gamma { .. } | Command::Sums { .. } | Command::Signs { .. } => Vec::new(),
        }
    }
}
