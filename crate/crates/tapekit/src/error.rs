use thiserror::Error;

/// Errors surfaced by the library. Divergence and stuckness are not errors:
/// they are [`crate::Outcome`] values.
#[derive(Debug, Error)]
pub enum Error {
    #[error("component {component} out of range for arity {arity}")]
    ComponentOutOfRange { component: u32, arity: u32 },

    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: u32, got: u32 },

    #[error("bias {0} outside [0,1]")]
    BiasOutOfRange(String),

    #[error("degenerate measure: almost-sure reasoning needs every bias in the open interval (0,1)")]
    DegenerateMeasure,

    #[error("pushforward unsupported: address map is not injective")]
    NonInjectivePushforward,

    #[error("empty family")]
    EmptyFamily,

    #[error("fuel must be positive")]
    ZeroFuel,

    #[error("universe must be nonempty")]
    EmptyUniverse,

    #[error("almost-sure mode requires a measure")]
    MissingMeasure,

    #[error("proposition undefined at outcome {0}")]
    UndefinedOutcome(String),

    #[error("unexpected free variable {0}")]
    FreeVariable(String),

    #[error("judgment does not hold; nothing to transport or extract")]
    JudgmentDoesNotHold,

    #[error("transport of almost-sure judgments is unsupported: the source-space measure is not determined by the target-space one")]
    AlmostSureTransport,

    #[error("transported judgment failed re-verification; this indicates an implementation fault: {0}")]
    TransportFault(String),

    #[error("value out of range: {0}")]
    ValueOutOfRange(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid truth value: {0}")]
    InvalidTruthValue(String),

    #[error("unknown tape map `{0}`")]
    UnknownMap(String),

    #[error("invalid json: {0}")]
    Json(String),

    #[error("outcome labels `{0}` and `{1}` collide when rendered; rename the constants")]
    LabelCollision(String, String),
}
