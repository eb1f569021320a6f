use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("component mismatch: expected {expected}, found {found}")]
    ComponentMismatch { expected: usize, found: usize },

    #[error("non-finite symbol value at wavevector {wavevector:?}")]
    NonFiniteSymbol { wavevector: Vec<i64> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("inadmissible exponents: {0}")]
    Inadmissible(String),

    #[error("non-finite accumulation: {0}")]
    Overflow(String),

    #[error("quadrature did not converge (error estimate {estimate:.3e}, target {target:.3e})")]
    QuadratureDivergence { estimate: f64, target: f64 },

    #[error("no convergence after {iterations} iterations (last ratios {ratios:?})")]
    NotConverged { iterations: usize, ratios: Vec<f64> },

    #[error("infinite norm: {0}")]
    InfiniteNorm(String),

    #[error("smallness gate `{gate}` failed: data norm {norm:.6e} exceeds {bound:.6e}")]
    Smallness {
        gate: &'static str,
        norm: f64,
        bound: f64,
    },

    #[error("malformed field file at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
