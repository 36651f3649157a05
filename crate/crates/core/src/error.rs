use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("lambda(theta) - q(theta) = {value:e} at theta = {theta} is not positive")]
    NonPositiveGap { theta: f64, value: f64 },

    #[error("spectral function g(theta) = {value:e} at theta = {theta} is not positive")]
    NonPositiveSymbol { theta: f64, value: f64 },

    #[error("model validation failed: {0}")]
    ValidationFailed(String),

    #[error("matrix factorization failed ({0}); the model is singular or indefinite")]
    SingularMatrix(String),

    #[error("block does not fit the lattice: {0}")]
    BlockOutOfRange(String),

    #[error("dense form of {requested} entries exceeds the size cap of {cap}")]
    SizeCap { requested: usize, cap: usize },

    #[error("value {x} is below the admissible range [1 - 1e-9, inf)")]
    DomainError { x: f64 },

    #[error("matrix is not positive definite ({0})")]
    NotPositiveDefinite(String),

    #[error("product spectrum has imaginary residue {residue:e} beyond tolerance")]
    ComplexEigenvalue { residue: f64 },

    #[error("index {index} out of range for {len} sites")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("degenerate fit design: {0}")]
    DegenerateDesign(String),
}
