use thiserror::Error;

use crate::scalar::GradingMismatch;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("malformed record (p={p}, n={n}, k={k}): {reason}")]
    MalformedRecord {
        p: u64,
        n: u32,
        k: u32,
        reason: &'static str,
    },

    #[error("seed for prime {p} is missing")]
    MissingPrime { p: u64 },

    #[error("seed for prime {p} violates the Satake constraints: {reason}")]
    NotSatake { p: u64, reason: String },

    #[error("malformed denominator: {0}")]
    MalformedDenominator(&'static str),

    #[error("numerator degree {num} is not below denominator degree {den}")]
    ImproperFraction { num: usize, den: usize },

    #[error("denominator factorization unavailable; refusing implicit root finding")]
    FactorizationMissing,

    #[error("factored denominator does not reproduce the stored denominator (residual {0:e})")]
    FactorizationMismatch(f64),

    #[error("{0} lies outside the scope of the lemma: x must be a non-integer rational")]
    IntegerArgument(String),

    #[error("f_{n} vanishes at {x}")]
    LemmaViolated { n: usize, x: String },

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("table cutoff {have} is below the requested {need}")]
    CutoffTooSmall { have: usize, need: usize },

    #[error("invalid weights k1={k1}, k2={k2}: need k1 >= k2 >= 4")]
    InvalidWeights { k1: u32, k2: u32 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error(transparent)]
    Grading(#[from] GradingMismatch),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("duplicate record (p={p}, n={n}) at line {line}")]
    DuplicateRecord { p: u64, n: u32, line: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
