use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval: lo = {lo} > hi = {hi}")]
    InvalidInterval { lo: f64, hi: f64 },
    #[error("quadrature did not converge: {0}")]
    NonConvergent(&'static str),
    #[error("target {target} not bracketed: g({lo}) = {glo}, g({hi}) = {ghi}")]
    NotBracketed {
        target: f64,
        lo: f64,
        hi: f64,
        glo: f64,
        ghi: f64,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("knots do not define a convex nondecreasing function: {0}")]
    NonConvex(String),
    #[error("value {value} out of range: {context}")]
    OutOfRange { value: f64, context: String },
    #[error("integral of y dM'(y) diverges; truncate the function first")]
    DivergentMass,
    #[error("M'(0) = {0} but the inversion requires M'(0) = 0")]
    NonzeroDerivativeAtZero(f64),
    #[error("function cannot be inverted into a distribution: {0}")]
    DegenerateFunction(String),
    #[error("distribution has infinite mean")]
    InfiniteMean,
    #[error("empty sample")]
    EmptySample,
    #[error("dimension mismatch: vector has {vector_len} entries, sequence has {sequence_len}")]
    DimensionMismatch {
        vector_len: usize,
        sequence_len: usize,
    },
    #[error("n = {n} exceeds the exact enumeration cap {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("conjugate function is not invertible on the required range: {0}")]
    ConjugateNotInvertible(String),
    #[error("no second derivative is available for this function kind")]
    MissingSecondDerivative,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
