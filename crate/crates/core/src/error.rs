use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors shared by every module in this crate.
///
/// Variants split into two families: input problems (shape and format,
/// e.g. [`Error::NonSquare`], [`Error::InvalidInput`]) and mathematical
/// precondition failures (e.g. [`Error::NotCompletelyPositive`],
/// [`Error::NotUnitalChannel`]). The CLI maps the two families to
/// different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not square: {rows}x{cols}")]
    NonSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("map is not completely positive (Choi eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("map is not Hermiticity-preserving (Choi Hermiticity defect {defect:.3e})")]
    NotHermiticityPreserving { defect: f64 },

    #[error("map is not unital (defect {defect:.3e})")]
    NotUnital { defect: f64 },

    #[error("not a unital trace-preserving channel (unital defect {unital_defect:.3e}, trace defect {trace_defect:.3e})")]
    NotUnitalChannel { unital_defect: f64, trace_defect: f64 },

    #[error("Phi(p) - p is neither positive nor negative semidefinite (defects {up_defect:.3e}, {down_defect:.3e})")]
    NotMonotone { up_defect: f64, down_defect: f64 },

    #[error("iteration did not converge after {iterations} steps (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("operation requires a qubit channel, got dimension {dim}")]
    NotQubit { dim: usize },

    #[error("classification is inconsistent at the given tolerance: {detail}")]
    ToleranceConflict { detail: String },

    #[error("precondition failed: {detail}")]
    PreconditionFailed { detail: String },

    #[error("internal consistency check failed: {detail}")]
    Inconsistent { detail: String },

    #[error("invalid input: {detail}")]
    InvalidInput { detail: String },
}

impl Error {
    /// True for errors that report a violated mathematical precondition
    /// rather than malformed input.
    pub fn is_math_precondition(&self) -> bool {
        matches!(
            self,
            Error::NotCompletelyPositive { .. }
                | Error::NotHermiticityPreserving { .. }
                | Error::NotUnital { .. }
                | Error::NotUnitalChannel { .. }
                | Error::NotMonotone { .. }
                | Error::NoConvergence { .. }
                | Error::NotQubit { .. }
                | Error::ToleranceConflict { .. }
                | Error::PreconditionFailed { .. }
        )
    }
}
