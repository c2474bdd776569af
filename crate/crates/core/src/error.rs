use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("{0} is not a supported prime modulus")]
    NotPrime(u64),
    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("polynomials or scalars from different rings")]
    RingMismatch,
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("matrix is singular")]
    Singular,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("at most {max} variables are supported, got {got}")]
    TooManyVariables { got: usize, max: usize },
    #[error("ideal is not zero-dimensional")]
    PositiveDimensional,
    #[error("ideal is not supported at the origin")]
    SupportNotAtOrigin,
    #[error("multiplication matrices do not commute")]
    NotCommuting,
    #[error("multiplication matrix is not nilpotent")]
    NotNilpotent,
    #[error("generator is not homogeneous for the ambient twists")]
    Inhomogeneous,
}
