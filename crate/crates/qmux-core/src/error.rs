use crate::quantum::QubitLabel;

/// Errors produced by the engine, the noise models and the protocol layer.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("unknown qubit label {0} in this layout")]
    UnknownLabel(QubitLabel),
    #[error("duplicate qubit label {0}")]
    DuplicateLabel(QubitLabel),
    #[error("gate targets must be distinct, got {0} twice")]
    DuplicateTargets(QubitLabel),
    #[error("qubit count {requested} exceeds the configured cap {cap}")]
    QubitCapExceeded { requested: usize, cap: usize },
    #[error("layout mismatch: {0}")]
    LayoutMismatch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("forced outcome {outcome} has probability {probability:.3e}")]
    ImpossibleOutcome { outcome: u8, probability: f64 },
    #[error("physical invariant violated: {0}")]
    InvariantViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
