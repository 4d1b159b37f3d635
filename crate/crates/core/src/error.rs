use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },

    #[error("operator is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("density operator trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("POVM effects do not sum to identity (max entry deviation {deviation:e})")]
    IncompletePovm { deviation: f64 },

    #[error("Born probability has imaginary part {imag:e}")]
    NonRealProbability { imag: f64 },

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid channel: {0}")]
    InvalidMac(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("enumeration of {count} strategies exceeds the cap of {cap}")]
    TooManyStrategies { count: u128, cap: u128 },

    #[error("LP has {columns} columns, above the limit of {limit}")]
    LpTooLarge { columns: usize, limit: usize },

    #[error("LP objective is unbounded below")]
    Unbounded,

    #[error("target channel has irrational entries; use a witness to separate it instead")]
    IrrationalTarget,

    #[error("remote state preparation requires real amplitudes (input {input} has |Im| = {imag:e})")]
    NonRealTarget { input: usize, imag: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
