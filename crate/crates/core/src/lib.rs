//! Hecke eigenvalue machinery for degree-2 Siegel cusp forms.
//!
//! Normalized eigenvalues `λ(pⁿ)` are generated from per-prime seeds by the
//! four-term spin recurrence ([`eigen`]), packaged as rational generating
//! functions and multiplied coefficientwise into Rankin–Selberg local factors
//! ([`gf`]), checked for joint non-vanishing ([`nonvanishing`]), assembled into
//! Dirichlet series and archimedean data ([`analytic`]), and sampled for sign
//! statistics ([`signs`]).

pub mod analytic;
pub mod eigen;
pub mod error;
pub mod gf;
pub mod nonvanishing;
pub mod primes;
pub mod scalar;
pub mod signs;

pub use error::{Error, Result};
pub use scalar::{GradedRational, Parity, Scalar};
