use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("constant term of the series is not a unit")]
    NonUnitConstantTerm,
    #[error("insufficient precision: tail bound {bound} exceeds 0.25")]
    InsufficientPrecision { bound: f64 },
    #[error("requested n = {n} exceeds the table truncation {trunc}")]
    TruncationExceeded { n: usize, trunc: usize },
    #[error("odd dimension {0}")]
    OddDimension(usize),
    #[error("domain error: {0}")]
    DomainError(String),
    #[error("bracket is not positive for j = {j}")]
    NonpositiveCuspWeight { j: i64 },
    #[error("theorem hypotheses fail: chi = {chi}, sigma = {sigma}")]
    HypothesisViolation { chi: i64, sigma: i64 },
    #[error("denominator vanishes at n = {0}")]
    ZeroDenominator(usize),
    #[error("series did not converge: {0}")]
    ConvergenceFailure(String),
    #[error("invalid input: {0}")]
    Validation(String),
}

impl Error {
    /// Whether the error comes from the numerics rather than from bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::InsufficientPrecision { .. }
                | Error::ConvergenceFailure(_)
                | Error::NonpositiveCuspWeight { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
