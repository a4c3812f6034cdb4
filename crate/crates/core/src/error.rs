use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{field} = {value} is out of range (max {max})")]
    Range {
        field: &'static str,
        value: usize,
        max: usize,
    },

    #[error("shape mismatch: expected dimension {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("invalid value for {field}: {reason}")]
    Domain { field: &'static str, reason: String },

    #[error("pulse {pulse} would raise {population:.3e} population past the Fock cutoff")]
    TruncationRisk { pulse: String, population: f64 },

    #[error("step size too large: norm/trace drift {drift:.3e} exceeds {bound:.1e}")]
    StepSize { drift: f64, bound: f64 },

    #[error("operator is not Hermitian (max |H - H^dag| = {0:.3e})")]
    NonHermitian(f64),

    #[error("pulse {index} ({case}) has zero coupling rate; duration is undefined")]
    ZeroCoupling { index: usize, case: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
