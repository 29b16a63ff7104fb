use thiserror::Error;

/// Errors surfaced by the model and the config layer.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A config file or key/value assignment could not be interpreted.
    #[error("config error: {0}")]
    Config(String),

    /// The degree distribution cannot support the requested operation.
    #[error("degenerate network: {0}")]
    DegenerateNetwork(String),

    /// A matrix required by an oracle is singular or not positive definite.
    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    /// Truncating an infinite distribution left too much tail mass.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// An explicit integrator step left the admissible state space.
    #[error("step size error: {0}")]
    StepSize(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
