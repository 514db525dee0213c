use thiserror::Error;

/// Errors raised by the numerical kernel and the measurement/information layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |H - H^+| entry = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix has no positive eigenvalue")]
    ZeroMatrix,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("parameter `{name}` = {value} is outside [0, 1]")]
    OutOfRange { name: &'static str, value: f64 },

    #[error("time step must be positive")]
    ZeroDt,
}

pub type Result<T> = std::result::Result<T, Error>;
