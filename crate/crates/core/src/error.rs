use thiserror::Error;

/// Errors produced by the deconvolution library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data failed a structural check (length, symmetry, finiteness).
    #[error("validation error: {0}")]
    Validation(String),

    /// The filter violates a model assumption (for instance a zero Fourier coefficient).
    #[error("model violation: {0}")]
    Model(String),

    /// An estimator or benchmark configuration is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// An iterative numerical routine did not converge.
    #[error("numerical error: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("toml error: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}
