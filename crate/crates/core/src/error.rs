use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid panel: {0}")]
    InvalidPanel(String),

    /// A series with zero variance cannot enter the covariance system.
    #[error("variable `{label}` (index {index}) has zero variance")]
    DegenerateInput { index: usize, label: String },

    #[error("covariance matrix is singular or ill-conditioned (condition number {condition:.3e})")]
    SingularCovariance { condition: f64 },

    #[error("Fisher information matrix for target {target} is not invertible")]
    SingularInformation { target: usize },

    #[error("normalizer vanishes for target {target}")]
    DegenerateNormalizer { target: usize },

    #[error("simulation diverged at step {step}")]
    Divergence { step: usize },

    #[error("serialization error: {0}")]
    Serialization(String),
}
