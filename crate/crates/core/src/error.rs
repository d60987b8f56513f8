use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field spec `{0}` (expected `p:<prime>`, `ext:<prime>^<k>` or `Q`)")]
    InvalidFieldSpec(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field too large: {0}")]
    FieldTooLarge(String),
    #[error("characteristic {p} divides degree {d}")]
    CharDividesDegree { p: u64, d: u64 },
    #[error("invalid field element `{0}`")]
    InvalidElement(String),
    #[error("syntax error at position {pos}: {msg}")]
    SyntaxError { pos: usize, msg: String },
    #[error("polynomial is not homogeneous: `{first}` has degree {first_degree}, `{second}` has degree {second_degree}")]
    NotHomogeneous {
        first: String,
        first_degree: u32,
        second: String,
        second_degree: u32,
    },
    #[error("variable index {index} out of range for {nvars} variables")]
    VariableOutOfRange { index: usize, nvars: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("substitution polynomial is not linear")]
    NotLinear,
    #[error("substitution for x{0} refers to x{0}")]
    SelfReference(usize),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("invalid degree {0}")]
    InvalidDegree(u32),
    #[error("index {index} out of range for size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("all coordinates are zero")]
    ZeroPoint,
    #[error("points are linearly dependent and cannot be moved to standard positions")]
    DependentPoints,
    #[error("group order {order} exceeds cap {cap}")]
    CapExceeded { order: u128, cap: u128 },
    #[error("enumeration of {count} points exceeds cap {cap}")]
    EnumerationCapExceeded { count: u128, cap: u128 },
    #[error("operation requires a finite field")]
    InfiniteField,
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("point lies on the hypersurface")]
    PointOnHypersurface,
    #[error("no primitive {d}-th root of unity; smallest extension containing one has degree {min_extension_degree}")]
    NoRootOfUnity { d: u64, min_extension_degree: u64 },
    #[error("no outer Galois point found over extensions of degree <= {ext_max}")]
    NoGaloisPointFound { ext_max: u32 },
    #[error("not of cyclic cover shape: {0}")]
    NotACoverShape(String),
    #[error("normal form shape verification failed: {0}")]
    ShapeVerificationFailed(String),
    #[error("transform does not map one cover onto the other")]
    NotAnEquivalence,
    #[error("block structure violation: {0}")]
    BlockStructureViolation(String),
    #[error("required {d}-th root does not exist in any searched extension")]
    RootUnavailable { d: u64 },
}
