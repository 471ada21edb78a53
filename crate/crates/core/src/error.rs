use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix is not Hermitian: max |m - m^H| = {deviation:e} exceeds {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("amplitudes are not normalized: |alpha|^2 + |beta|^2 = {norm}")]
    Normalization { norm: f64 },

    #[error("basis mismatch: expected {expected}, found {found}")]
    Basis {
        expected: &'static str,
        found: &'static str,
    },

    #[error("trace {trace:e} is too small to renormalize")]
    VanishingTrace { trace: f64 },

    #[error("state must have unit trace, found {trace}")]
    ImproperState { trace: f64 },

    #[error("model {model} is not supported here: {reason}")]
    UnsupportedModel {
        model: &'static str,
        reason: &'static str,
    },

    #[error("{name} = {value} is outside its domain: {reason}")]
    Domain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid decomposition weights: {0}")]
    Weight(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("unknown check '{0}'")]
    UnknownCheck(String),

    #[error("invariant violated at t = {t}: {source}")]
    InvariantViolation { t: f64, source: Box<Error> },
}
