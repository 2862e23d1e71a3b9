use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the supported numerical window.
    #[error("domain error: {0}")]
    Domain(String),

    /// The effective model has non-positive or mixed-sign frequencies.
    #[error("invalid effective regime: {0}")]
    InvalidRegime(String),

    #[error("expansion point is not stationary: max |Omega| = {0:e}")]
    NotStationary(f64),

    #[error("matrix is not Hermitian: max deviation {0:e}")]
    NotHermitian(f64),

    /// Population reached the top of the Fock truncation.
    #[error("Fock truncation exceeded: population {population:e} in the two highest levels (fock_dim = {fock_dim})")]
    Truncation { population: f64, fock_dim: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
