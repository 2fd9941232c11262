use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("deformation parameter must lie in (0, 1), got {0}")]
    InvalidQ(String),
    #[error("precision must be at least 64 bits and at most {max} bits, got {got}")]
    InvalidPrecision { got: u32, max: u32 },
    #[error("scalars evaluated at different parameters: {0}")]
    ParameterMismatch(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("matrix is not self-adjoint (residual {0:e})")]
    NotSelfAdjoint(f64),
    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("kernel dimension {found} differs from expected multiplicity {expected} ({context})")]
    KernelDimension { expected: usize, found: usize, context: String },
    #[error("multiplicity mismatch: {0}")]
    Multiplicity(String),
    #[error("truncation margin too small: {0}")]
    Truncation(String),
    #[error("convention fault: {0}")]
    ConventionFault(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("CG cache corrupt: {0}")]
    CacheCorrupt(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
