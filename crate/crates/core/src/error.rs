use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expansion needs at least 16 steps, got {0}")]
    TooFewSteps(usize),
    #[error("step count {0} outside the supported range 1..=128")]
    StepsOutOfRange(usize),
    #[error("unknown variant `{0}`")]
    UnknownVariant(String),
    #[error("unknown expansion kind `{0}`")]
    UnknownKind(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is singular modulo 2")]
    Singular,
    #[error("message of {0} bytes does not fit a single padded block")]
    MessageTooLong(usize),
    #[error("not a disturbance vector: {0}")]
    NotDisturbance(String),
    #[error(
        "disturbance is not confined to the most significant bit (word {index} = {value:#010x})"
    )]
    NotMsbOnly { index: usize, value: u32 },
    #[error("collision check failed for multiple {multiple}: digests differ")]
    CollisionFailed { multiple: u32 },
    #[error("step {0} out of range for a local collision")]
    StepOutOfRange(usize),
    #[error("trial count must be positive")]
    ZeroTrials,
    #[error("message modification failed at step {step}: {reason}")]
    ModificationFailed { step: usize, reason: String },
    #[error("expected {expected} words, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("codeword is not valid at {0} steps")]
    InvalidCodeword(usize),
    #[error("invalid search parameters: {0}")]
    InvalidParams(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
