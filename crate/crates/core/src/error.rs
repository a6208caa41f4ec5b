use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument is not finite")]
    NonFinite,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("window half-width {actual} is too small; at least {required} is required")]
    WindowTooSmall { required: usize, actual: usize },
    #[error("unsupported kernel order {0}")]
    UnsupportedOrder(f64),
    #[error("divergent quantity: {0}")]
    Divergent(String),
    #[error("kernel coefficients overflow: largest admissible cutoff is {max_admissible}, requested {requested}")]
    KernelOverflow { max_admissible: usize, requested: usize },
    #[error("index {index} outside [-{limit}, {limit}]")]
    IndexOutOfRange { index: i64, limit: usize },
    #[error("boundary Fourier coefficients do not decay (fitted exponent {exponent:.3})")]
    SlowDecay { exponent: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn finite(x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::NonFinite)
    }
}
