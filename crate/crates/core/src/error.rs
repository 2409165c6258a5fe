use thiserror::Error;

/// Errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Matrix, vector or channel dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// The steering matrix is numerically rank-deficient.
    #[error("ill-conditioned steering matrix: sigma_min/sigma_max = {ratio:.3e} is below {limit:.1e}")]
    IllConditioned { ratio: f64, limit: f64 },

    /// Input that is structurally valid but unusable (silent signal, empty list, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Text-format parse failure with a 1-based line number.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// Configuration file failed validation.
    #[error("config error: {0}")]
    Config(String),

    /// WAV encode/decode failure.
    #[error("wav error: {0}")]
    Wav(#[from] hound::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
