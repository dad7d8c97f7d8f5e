//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: left is {lrows}x{lcols}, right is {rrows}x{rcols}")]
    ShapeMismatch {
        op: &'static str,
        lrows: usize,
        lcols: usize,
        rrows: usize,
        rcols: usize,
    },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("entry count {got} does not match {rows}x{cols}")]
    BadEntryCount { rows: usize, cols: usize, got: usize },

    #[error("index specs disagree in {op}: {detail}")]
    IndexSpecMismatch { op: &'static str, detail: String },

    #[error("unknown classical index `{0}`")]
    UnknownIndex(String),

    #[error("duplicate classical index `{0}`")]
    DuplicateIndex(String),

    #[error("quantum wire mismatch in {op}: {out} out vs {inp} in")]
    QuantumWireMismatch {
        op: &'static str,
        out: usize,
        inp: usize,
    },

    #[error("basis {index} is not unitary: deviation {deviation:e}")]
    NonUnitaryBasis { index: usize, deviation: f64 },

    #[error("unsupported dimension {0}; supported: 2, 3, 4, 5, 7, 8, 9")]
    UnsupportedDimension(usize),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("inverse of zero in GF({p}^{k})")]
    ZeroInverse { p: u64, k: usize },

    #[error("function arrays have different lengths: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("malformed family data: {0}")]
    ParseFamily(String),

    #[error("index {what}={got} out of range (must be < {bound})")]
    IndexOutOfRange {
        what: &'static str,
        got: usize,
        bound: usize,
    },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
