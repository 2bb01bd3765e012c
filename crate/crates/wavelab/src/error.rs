//! Error type shared by every module of the crate.

use thiserror::Error;

/// Everything that can go wrong inside the library.
#[derive(Debug, Error)]
pub enum WaveLabError {
    #[error("grid mismatch: fields live on different radial grids")]
    GridMismatch,

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("ill-posed request: {0}")]
    IllPosed(String),

    #[error("unresolved field: {what} (tail fraction {fraction:.3e})")]
    Unresolved { what: &'static str, fraction: f64 },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("trajectory escaped |x| > {bound} at s = {s}")]
    Escape { s: f64, bound: f64 },

    #[error("integrator failure: {0}")]
    Integrator(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, WaveLabError>;

pub(crate) fn ensure_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(WaveLabError::NonFinite(what))
    }
}
