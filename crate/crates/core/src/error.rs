use thiserror::Error;

/// Everything that can go wrong across the crate.
///
/// Numerical verdicts (reducible or not, commuting or not) are never
/// reported through this type; they live in the report structs. Errors are
/// reserved for violated preconditions and numerical breakdowns.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("arity mismatch: expected {expected}, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("matrix is not normal (commutator residual {residual:.3e})")]
    NotNormal { residual: f64 },
    #[error("matrix is not diagonal (off-diagonal mass {residual:.3e})")]
    NotDiagonal { residual: f64 },
    #[error("iterative eigensolver did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("interpolation grid of {points} points exceeds cap {cap}")]
    GridTooLarge { points: u128, cap: usize },
    #[error("leading coefficient {leading:.3e} is degenerate relative to {scale:.3e}")]
    DegenerateLeadingCoefficient { leading: f64, scale: f64 },
    #[error("every one of {attempts} random directions dropped the degree")]
    DegenerateDirections { attempts: usize },
    #[error("root paths collided along coordinate {coordinate} at step size {step:.3e}")]
    ContinuationCollision { coordinate: usize, step: f64 },
    #[error("polynomial is not completely reducible")]
    NotReducible,
    #[error("hyperplane normal vector is zero")]
    ZeroNormal,
    #[error("change-of-basis matrix is singular (residual {residual:.3e})")]
    SingularC { residual: f64 },
    #[error("matrices do not commute (leakage {leakage:.3e})")]
    NotCommuting { leakage: f64 },
    #[error("no shared eigenvector: eigen residual {eigen_residual:.3e}, inner residual {inner_residual:.3e}")]
    NoSharedVector {
        eigen_residual: f64,
        inner_residual: f64,
    },
    #[error("contour passes through the spectrum (nearest eigenvalue at distance {distance:.3e})")]
    ContourThroughSpectrum { distance: f64 },
    #[error("trace {trace:.6} of the Riesz projection is not an integer")]
    RankMismatch { trace: f64 },
    #[error("eigenvalue multiplicity {multiplicity} requires self-adjoint operators")]
    MultiplicityRegimeViolation { multiplicity: usize },
    #[error("perturbed eigenvalue or root could not be tracked")]
    TrackingLost,
    #[error("point is singular on the spectral variety (|dp/dz| = {derivative:.3e})")]
    SingularPoint { derivative: f64 },
    #[error("{0} is not an eigenvalue of the matrix")]
    NotAnEigenvalue(num_complex::Complex64),
}

pub type Result<T> = std::result::Result<T, Error>;
