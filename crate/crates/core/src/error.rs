use thiserror::Error;

/// Errors raised by the verification library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("angle vector is empty")]
    EmptyInput,

    #[error("angles sum to {actual}, expected {expected}")]
    SumMismatch { expected: f64, actual: f64 },

    #[error("angle {index} = {value} lies outside the open interval (0, {bound})")]
    OutOfDomain { index: usize, value: f64, bound: f64 },

    #[error("mean angle {sigma} lies outside the admissible interval ({lower}, {upper})")]
    DomainViolation { sigma: f64, lower: f64, upper: f64 },

    #[error("polygon needs at least 3 sides, got {0}")]
    InvalidN(usize),

    #[error("radius must be positive and finite, got {0}")]
    InvalidRadius(f64),

    #[error("polygon angles must sum to pi, got total {0}")]
    TotalNotPi(f64),

    #[error("no admissible simplex sample after {attempts} draws (margin {margin} too tight)")]
    RejectionBudgetExceeded { attempts: usize, margin: f64 },

    #[error("margin {margin} leaves no admissible point: mean angle {sigma} outside ({margin}, {upper})")]
    InfeasibleMargin { margin: f64, sigma: f64, upper: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("matrix is not doubly stochastic: {0}")]
    NotDoublyStochastic(String),

    #[error("point is within {clearance} of the domain boundary, finite-difference step is {step}")]
    TooCloseToBoundary { clearance: f64, step: f64 },

    #[error("family `{family}` is not {required}")]
    WrongConvexityClass {
        family: &'static str,
        required: &'static str,
    },

    #[error("exponent k must be an integer >= 2, got {0}")]
    BadK(u32),

    #[error("exponent alpha must be a positive integer, got {0}")]
    BadAlpha(u32),

    #[error("angle totals differ: {0} vs {1}")]
    TotalsDiffer(f64, f64),

    #[error("family `{0}` does not satisfy f'^2 - f f'' = const")]
    MissingMu(&'static str),

    #[error("unknown catalog entry `{0}`")]
    UnknownId(String),

    #[error("entry `{id}` applies to {required} polygons, got {actual}")]
    KindMismatch {
        id: String,
        required: String,
        actual: String,
    },

    #[error("parameters alpha={alpha}, k={k:?} are outside the domain of `{id}`")]
    ParamOutOfDomain { id: String, alpha: u32, k: Option<u32> },

    #[error("grid scan needs {points} lattice points, cap is {cap}")]
    BudgetExceeded { points: u128, cap: u128 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
