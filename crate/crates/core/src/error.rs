use thiserror::Error;

/// Errors produced by tensor construction, the solvers and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid tensor space: {0}")]
    InvalidSpace(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("tensor spaces differ: {left} vs {right}")]
    SpaceMismatch { left: String, right: String },
    #[error("tensor orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("scalar fields differ")]
    FieldMismatch,
    #[error("real-field tensor has a nonzero imaginary part at entry {0}")]
    ComplexEntryInRealTensor(usize),
    #[error("invalid mode subset: {0}")]
    InvalidModes(String),
    #[error("invalid exponent {0}: must lie in [1, inf]")]
    InvalidExponent(f64),
    #[error("exponent {0} is required for this norm but was not configured")]
    MissingExponent(&'static str),
    #[error("exponents {alpha} and {beta} are not Hölder conjugates")]
    NotConjugate { alpha: f64, beta: f64 },
    #[error("witness is zero")]
    ZeroWitness,
    #[error("simple tensor is not unit: {0}")]
    NotUnit(String),
    #[error("brute-force oracle refused the input: {0}")]
    BruteForceGuard(String),
    #[error("empty tensor tuple")]
    EmptyTuple,
    #[error("invalid law case: {0}")]
    InvalidCase(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
