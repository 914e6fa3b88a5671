use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid interval ({a}, {b}): endpoints must be finite with a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("initial value must be finite, got {0}")]
    NonFiniteInitialValue(f64),

    #[error("primitive of {coefficient} is not finite at x = {x} (value {value})")]
    NonFinitePrimitive {
        coefficient: &'static str,
        x: f64,
        value: f64,
    },

    #[error("invalid singular points: {0}")]
    InvalidSingularPoints(String),

    #[error("invalid monotone pieces: {0}")]
    InvalidMonotonePieces(String),

    #[error("x = {x} lies outside [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("cell index {index} out of range for {cells} cells")]
    CellOutOfRange { index: usize, cells: usize },

    #[error("level {0} exceeds the supported maximum of {max}", max = crate::interp::MAX_LEVEL)]
    LevelTooLarge(u32),

    #[error("interpolant levels differ: p at level {p}, q at level {q}")]
    LevelMismatch { p: u32, q: u32 },

    #[error("node {index} at x = {x} is not finite (value {value})")]
    NonFiniteNode { index: usize, x: f64, value: f64 },

    #[error("exponential overflow in {0}")]
    Overflow(String),

    #[error("problem must be posed on [0, 1], found [{a}, {b}]")]
    NotNormalized { a: f64, b: f64 },

    #[error("derivative of {0} is required but was not supplied")]
    MissingDerivative(&'static str),

    #[error("quadrature did not converge on [{a}, {b}]: residual estimate {residual:e}")]
    NonConvergence { a: f64, b: f64, residual: f64 },

    #[error("integrand is not finite at t = {t}")]
    NonFiniteIntegrand { t: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
