use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("level {0} is not a prime >= 5")]
    InvalidLevel(u64),

    #[error("{0} is not a negative discriminant")]
    NotADiscriminant(i64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    /// An internal consistency check failed. These indicate a bug, not bad input.
    #[error("internal verification failed: {0}")]
    Verification(String),

    #[error(
        "eigenvalue gap {gap:e} below tolerance after using Hecke operators up to {max_prime}"
    )]
    DegenerateSpectrum { gap: f64, max_prime: u64 },

    #[error("found {found} eigenforms, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("eigenvector residual {residual:e} too large for T_{m}")]
    ResidualTooLarge { m: u64, residual: f64 },

    #[error("level {level} has no class with w = {weight}")]
    NoSuchClass { level: u64, weight: u32 },

    #[error("eigenforms belong to different levels ({0} vs {1})")]
    LevelMismatch(u64, u64),

    #[error("Brandt matrix T_{0} not computed")]
    MissingMatrix(u64),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
