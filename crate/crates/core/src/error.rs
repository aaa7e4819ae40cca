use thiserror::Error;

/// Errors raised by module construction, arithmetic and file handling.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("box mismatch: {0}")]
    BoxMismatch(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("box has {count} vertices, above the cap of {cap}")]
    TooManyVertices { count: u128, cap: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("not a square matrix ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("hyperplane image escapes the box: {0}")]
    ImageEscapesBox(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("invalid rectangle: {0}")]
    InvalidRectangle(String),
    #[error("nonzero formal entry ({row},{col}) where the canonical hom space is zero")]
    NoCanonicalHom { row: usize, col: usize },
    #[error("not a natural transformation: {0}")]
    NotNatural(String),
    #[error("module does not satisfy the commutativity relations: {0}")]
    NotCommutative(String),
    #[error("empty input: {0}")]
    Empty(String),
    #[error("parity violation: {0}")]
    Parity(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
