use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FieldError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular configuration: {0}")]
    Singular(String),
    #[error("quadrature failed to reach tolerance {tol:e} (estimate {estimate:e})")]
    Tolerance { tol: f64, estimate: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("operator has an isolated zero mode; inverse is undefined")]
    NoInverse,
    #[error("inconsistent source: {0}")]
    InconsistentSource(String),
    #[error("unsupported distributional order: {0}")]
    UnsupportedOrder(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("evaluation point outside valid region: {0}")]
    OutOfRegion(String),
    #[error("turning point: U(x) <= 0 at x = {x}")]
    TurningPoint { x: f64 },
    #[error("classification error: {0}")]
    Classification(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("divergent integral: {0}")]
    Divergent(String),
}

pub type Result<T> = std::result::Result<T, FieldError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(FieldError::Domain(msg.into()))
}
