use thiserror::Error;

/// Errors raised by the exact and numerical layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("zero denominator in scalar ({a}, {b}, 0)")]
    ZeroDenominator { a: String, b: String },

    #[error("field parameter d = {0} is not a square-free positive integer")]
    BadDiscriminant(u64),

    #[error("nonzero irrational part {b} in rational mode (d = 1)")]
    IrrationalInRationalField { b: String },

    #[error("mixed fields: d = {0} and d = {1}")]
    FieldMismatch(u32, u32),

    #[error("division by zero")]
    DivisionByZero,

    #[error("malformed scalar text {0:?}")]
    ScalarParse(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("singular matrix")]
    Singular,

    #[error("rank n = {0} is outside the supported range (n >= 2)")]
    BadRank(usize),

    #[error("matrix {label} does not preserve the Gram form")]
    NotFormPreserving { label: String },

    #[error("matrix {label} has determinant {det}, expected 1")]
    BadDeterminant { label: String, det: String },

    #[error("numerical breakdown in {what}: {detail}")]
    Numerical { what: &'static str, detail: String },

    #[error("model mismatch: {0}")]
    Model(String),

    #[error("generator file: {0}")]
    GeneratorFile(String),

    #[error("bending: {0}")]
    Bending(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("{0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
