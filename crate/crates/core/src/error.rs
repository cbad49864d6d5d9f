use thiserror::Error;

use crate::hypotheses::Violation;

/// Errors produced by the library.
///
/// Matrix row and record indices stored in variants are 0-based; the
/// `Display` output numbers them from 1 because it is read against text
/// files.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid dimension {0}: need at least one node")]
    InvalidDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("node {node} out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("digraph is not strongly connected")]
    NotStronglyConnected,

    #[error("node set is not a strongly connected component")]
    NotAComponent,

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("matrix is not square: row {} has {len} entries, expected {n}", row + 1)]
    NotSquare { row: usize, len: usize, n: usize },

    #[error("row {}, column {}: entry is not finite", row + 1, col + 1)]
    NonFinite { row: usize, col: usize },

    #[error("row {}, column {}: negative entry {value}", row + 1, col + 1)]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("row {}: row sum {sum} is not within {tol} of 1", row + 1)]
    RowSum { row: usize, sum: f64, tol: f64 },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid product range: need 0 <= l <= k <= {len}, got l = {l}, k = {k}")]
    InvalidRange { l: usize, k: usize, len: usize },

    #[error("alpha must be positive and finite, got {0}")]
    NonPositiveAlpha(f64),

    #[error("alpha {alpha} exceeds the smallest positive entry {actual}")]
    AlphaNotLowerBound { alpha: f64, actual: f64 },

    #[error("tolerance must be finite and non-negative, got {0}")]
    InvalidTolerance(f64),

    #[error("entry floor underflows double precision (log10 = {log10:.1})")]
    FloorUnderflow { log10: f64 },

    #[error("certification refused: {}", join_violations(violations))]
    CertificationRefused { violations: Vec<Violation> },

    #[error("certificate check failed: measured semi-norm {measured} exceeds contraction {contraction}")]
    CertificateCheck { measured: f64, contraction: f64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no matrices")]
    NoMatrices,

    #[error("record {}: {source}", record + 1)]
    Record {
        record: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}
