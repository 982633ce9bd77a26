use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix {index} is not square ({rows}x{cols})")]
    NotSquare { index: usize, rows: usize, cols: usize },
    #[error("matrix {index} has non-finite entries")]
    NonFinite { index: usize },
    #[error("element {index} is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { index: usize, deviation: f64 },
    #[error("element {index} is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { index: usize, min_eigenvalue: f64 },
    #[error("elements do not sum to identity (max deviation {deviation:.3e})")]
    NotComplete { deviation: f64 },
    #[error("prior {index} is negative ({value:.3e})")]
    NegativePrior { index: usize, value: f64 },
    #[error("priors sum to {sum} instead of 1")]
    PriorsNotNormalized { sum: f64 },
    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),
    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),
    #[error("average state is singular (min eigenvalue {min_eigenvalue:.3e})")]
    SingularAverageState { min_eigenvalue: f64 },
    #[error("state {index} has zero weight")]
    ZeroWeightState { index: usize },
    #[error("ascent step annihilated every state; step size too large")]
    DegenerateUpdate,
    #[error("measurement elements do not commute (max commutator {max_commutator:.3e})")]
    NotCommuting { max_commutator: f64 },
    #[error("invalid conditional probability table: {0}")]
    InvalidTable(String),
}
