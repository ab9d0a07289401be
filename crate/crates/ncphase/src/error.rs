use thiserror::Error;

pub type Result<T> = std::result::Result<T, NcError>;

/// Error taxonomy shared across the crate.
#[derive(Debug, Clone, Error)]
pub enum NcError {
    #[error("matrix is not skew-symmetric: max |M + M^T| = {max_dev:.3e} exceeds 1e-12")]
    NotSkewSymmetric { max_dev: f64 },

    #[error("form is numerically singular: scaled |det| = {scaled_det:.3e} <= 1e-14")]
    SingularForm { scaled_det: f64 },

    #[error("partition mismatch: {0}")]
    PartitionMismatch(String),

    #[error("deformation too large: theta*eta = {product} >= hbar^2 = {hbar_sq}; no real Darboux map of this form exists")]
    DeformationTooLarge { product: f64, hbar_sq: f64 },

    #[error("ordering mismatch: {0}")]
    OrderingMismatch(String),

    #[error("covariance too ill-conditioned: cond = {cond:.3e} exceeds 1e12")]
    IllConditioned { cond: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("negative mean occupation: {0}")]
    NegativeOccupation(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not symmetric: max |M - M^T| = {max_dev:.3e} exceeds 1e-12")]
    SymmetryViolation { max_dev: f64 },

    #[error("picture/form pairing violated: {0}")]
    PictureFormMismatch(String),

    #[error("matrix is not involutive: max |M^2 - I| = {max_dev:.3e}")]
    NotInvolutive { max_dev: f64 },

    #[error("matrix is not invertible")]
    NonInvertible,

    #[error("expected a state with {expected} modes, got {got}")]
    ModeCountMismatch { expected: usize, got: usize },
}
