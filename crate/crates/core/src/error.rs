use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library reports. Numeric payloads are widened to `f64`
/// so the type does not depend on the working precision.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Laplace argument {re}{im:+}i is within {distance:e} of a kernel pole")]
    PoleTooClose { re: f64, im: f64, distance: f64 },

    #[error("eigensolver did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("step too coarse: {0}")]
    StepTooCoarse(String),

    #[error("non-finite value produced: {0}")]
    NonFinite(String),

    #[error("physical horizon {horizon} exceeds cost cap {cap}")]
    HorizonTooLarge { horizon: f64, cap: f64 },

    #[error("time {t} is not on the propagator grid (step {step}, horizon {horizon})")]
    GridMiss { t: f64, step: f64, horizon: f64 },

    #[error("propagator V({t}) is numerically singular (condition number {cond:e})")]
    SingularPropagator { t: f64, cond: f64 },

    #[error("renormalization matrix is numerically singular (condition number {cond:e})")]
    SingularRenormalization { cond: f64 },

    #[error("generator is not diagonalizable within tolerance (eigenvector condition number {cond:e})")]
    DefectiveGenerator { cond: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate fit: error {error:e} at lambda = {lambda} is below the floor {floor:e}")]
    DegenerateFit { lambda: f64, error: f64, floor: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}
