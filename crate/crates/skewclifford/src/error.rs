use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("characteristic 2 is not supported")]
    CharacteristicTwo,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("polynomials are over different generator sets")]
    GeneratorMismatch,
    #[error("element is not homogeneous of degree 2")]
    NotDegreeTwo,
    #[error("projective point has a zero representative")]
    ZeroRepresentative,
    #[error("input relations are not homogeneous")]
    InhomogeneousInput,
    #[error("generators must all have degree 1")]
    DegreeOneGeneratorsRequired,
    #[error("degree {degree} exceeds the certified truncation bound {bound}")]
    DegreeExceedsTruncation { degree: usize, bound: usize },
    #[error("Hilbert data window too short (need at least {need} entries, got {got})")]
    WindowTooShort { need: usize, got: usize },
    #[error("matrix is not mu-symmetric at entry ({0}, {1})")]
    NotMuSymmetric(usize, usize),
    #[error("invalid mu matrix: {0}")]
    InvalidMu(String),
    #[error("element is not homogeneous")]
    InhomogeneousElement,
    #[error("normality is not defined for degree-zero elements")]
    DegreeZeroElement,
    #[error("matrices are linearly dependent; elimination is not unique (kernel dimension {0})")]
    MatricesLinearlyDependent(usize),
    #[error("finite-field scan unsupported: {0}")]
    UnsupportedFieldForScan(String),
    #[error("exact base-point check supported only for n <= 4 (got n = {0})")]
    ExactModeTooLarge(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
