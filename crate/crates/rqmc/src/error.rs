//! Crate-wide error type.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("base {0} is not prime")]
    NotPrime(u64),

    #[error("median order must be odd and positive, got {0}")]
    EvenMedianOrder(usize),

    #[error("budget exceeded for {what}: requires {required:.3e}, cap is {cap:.3e}")]
    BudgetExceeded {
        what: &'static str,
        required: f64,
        cap: f64,
    },

    #[error("unknown integrand '{0}'")]
    UnknownIntegrand(String),

    #[error("root refinement failed for degree {degree}: {detail}")]
    RootRefinement { degree: usize, detail: String },

    #[error("empty point set")]
    EmptyPointSet,

    #[error("method '{0}' does not emit a prefix-consistent stream; use a subsequence study instead")]
    NotPrefixConsistent(String),

    #[error("coordinate {value} outside [0,1) at point {point}, axis {axis}")]
    CoordinateOutOfRange {
        value: f64,
        point: usize,
        axis: usize,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
