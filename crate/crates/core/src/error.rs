use thiserror::Error;

use crate::linalg::QMatrix;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),

    #[error("ring mismatch: {0}")]
    RingMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The known windows of the inputs do not determine any coefficient of the result.
    #[error("truncation insufficient: {0}")]
    TruncationInsufficient(String),

    #[error("not a unit: {0}")]
    NotAUnit(String),

    #[error("division by an element that is zero within precision")]
    DivisionByZero,

    /// The t^-1 coefficient blocks term-by-term integration.
    #[error("antiderivative obstructed: t^-1 coefficient is {residue}")]
    Obstruction { residue: String },

    #[error("precision exhausted at {location}")]
    PrecisionExhausted { location: String },

    #[error("validation failed: {0}")]
    ValidationFailed(String),

    #[error("residue is nonzero, module is singular at t = 0")]
    NonSingularityViolation { residue: QMatrix },

    #[error("d1 o d0 is nonzero: {0}")]
    ComplexNotExact(String),

    #[error("ideal generated by {generator} is not stable: {detail}")]
    IdealNotStable { generator: String, detail: String },

    #[error("level out of range: {0}")]
    LevelOutOfRange(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}
