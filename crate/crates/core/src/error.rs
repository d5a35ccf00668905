//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PvaError {
    #[error("division by an identically-zero denominator")]
    ZeroDivide,
    #[error("no usable evaluation point after {retries} resamples")]
    UnluckyPoint { retries: u32 },
    #[error("dimension mismatch: expected (d,n)=({expected_d},{expected_n}), got ({got_d},{got_n})")]
    DimensionMismatch {
        expected_d: u8,
        expected_n: u8,
        got_d: u8,
        got_n: u8,
    },
    #[error("bracket is not skewsymmetric; residual entry ({i},{j}) is nonzero")]
    NotSkew { i: usize, j: usize },
    #[error("unsupported dimensions (d,n)=({d},{n}) for {what}")]
    UnsupportedDims { d: u8, n: u8, what: &'static str },
    #[error("entry depends on jet variables; only 0-jet coefficients are allowed here")]
    NonZeroJetEntry,
    #[error("bracket is not hydrodynamic (degree-1 homogeneous in jets and lambda)")]
    NotHydrodynamic,
    #[error("assignment does not cover unknown function `{name}`")]
    IncompleteAssignment { name: String },
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unsupported target/bracket combination: {0}")]
    UnsupportedCombination(String),
    #[error("condition system is not linear in the designated unknowns: {0}")]
    NonLinearSystem(String),
    #[error("{0}")]
    Invalid(String),
}
