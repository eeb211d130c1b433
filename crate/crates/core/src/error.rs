use thiserror::Error;

/// Errors produced by the library. Variants marked as input errors map to
/// CLI exit code 2; everything else is an internal or verification failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("prime modulus {0} exceeds 2^31")]
    ModulusTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed field specs in one computation")]
    MixedFieldSpecs,
    #[error("column count mismatch: {left} vs {right}")]
    ColumnMismatch { left: usize, right: usize },
    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },
    #[error("member dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("identical lines have no unique intersection point")]
    IdenticalLines,
    #[error("unsupported member kind: {0}")]
    UnsupportedMemberKind(String),
    #[error("degenerate object: {0}")]
    DegenerateObject(String),
    #[error("impossible generator parameters: {0}")]
    ImpossibleFamily(String),
    #[error("exhaustive flat enumeration needs {needed} flats, ceiling is {ceiling}")]
    ExhaustiveCeiling { needed: u64, ceiling: u64 },
    #[error("brute-force reference limits exceeded: {0}")]
    SizeLimit(String),
    #[error(
        "no separating polynomial below degree {max_degree}: the set is dense in an avoided flat"
    )]
    NoSeparation { max_degree: usize },
    #[error("point set is not {k}-free: {t_count} shared points between two members of T")]
    KFreeViolation { k: u32, t_count: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Every error variant reflects bad inputs or environment limits;
    /// verification violations are reported through result values, not
    /// errors, so CLI exit code 2 covers all of these.
    pub fn is_input_error(&self) -> bool {
        true
    }
}

pub type Result<T> = std::result::Result<T, Error>;
