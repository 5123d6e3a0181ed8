use thiserror::Error;

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("subsystem name collision: {0}")]
    NameCollision(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("space mismatch: {0}")]
    SpaceMismatch(String),
    #[error("unknown subsystem: {0}")]
    UnknownSubsystem(String),
    #[error("unknown level '{level}' in subsystem '{subsystem}'")]
    UnknownLevel { subsystem: String, level: String },
    #[error("probability out of range [0, 1]: {0}")]
    InvalidProbability(f64),
    #[error("channel is not trace preserving (max deviation {0:.3e})")]
    NotTracePreserving(f64),
    #[error("measurement basis is not orthonormal")]
    NonOrthonormalBasis,
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("i/o failure: {0}")]
    Io(String),
    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),
}
