use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Argument outside the domain of a function (e.g. a nonpositive radius).
    #[error("domain error: {0}")]
    Domain(String),
    /// Evaluation at a kernel singularity.
    #[error("singular evaluation: {0}")]
    Singularity(String),
    /// Invalid input data or configuration.
    #[error("validation error: {0}")]
    Validation(String),
    /// Boundary system close to a resonance (Dirichlet eigenvalue) or otherwise
    /// numerically singular.
    #[error("near-resonant boundary system (condition estimate {condition:.3e})")]
    Resonance { condition: f64 },
    /// Least-squares operator lost rank beyond the structural Helmholtz deficiency.
    #[error("ill-posed recovery: numerical rank {rank} below required {required}")]
    IllPosed { rank: usize, required: usize },
    /// An estimator had no usable samples.
    #[error("estimation failed: {0}")]
    Estimation(String),
    /// A shape update kept producing invalid curves.
    #[error("shape step failed: {0}")]
    StepFailure(String),
}
