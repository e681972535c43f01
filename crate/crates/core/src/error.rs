use thiserror::Error;

/// A pair of states `(earlier, later)` with `earlier ≺ later` whose policy
/// values are out of order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct Witness {
    pub earlier: usize,
    pub later: usize,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("game has no states")]
    EmptyStateList,
    #[error("state `{label}` has non-positive prior {prior}")]
    NonPositivePrior { label: String, prior: f64 },
    #[error("priors sum to {sum} (deviation {deviation:e} from 1)")]
    PriorSumMismatch { sum: f64, deviation: f64 },
    #[error("duplicate state label `{0}`")]
    DuplicateLabel(String),
    #[error("state `{label}` has a non-finite value in `{field}`")]
    NonFiniteValue { label: String, field: &'static str },
    #[error("expected {expected} entries, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("policy entry {index} is {value}, not a probability")]
    InvalidProbability { index: usize, value: f64 },
    #[error("policy violates the order constraint between states {} and {}", .0.earlier, .0.later)]
    NotSenderImplementable(Witness),
    #[error("mechanism is {rows}x{cols}, game has {expected} states")]
    DimensionMismatch { rows: usize, cols: usize, expected: usize },
    #[error("strategy maps state {state} to report {report}, outside the message space")]
    InvalidStrategy { state: usize, report: usize },
    #[error("senders do not share utilities at state `{0}`")]
    NotCommonInterest(String),
    #[error("alpha = {0} is outside [0, 1]")]
    AlphaOutOfRange(f64),
    #[error("gamma = {0} is outside [0, 1]")]
    GammaOutOfRange(f64),
    #[error("a sender is indifferent between the actions at state `{0}`")]
    IndifferentSenderState(String),
    #[error("{n} states exceed the enumeration limit of {max}")]
    TooManyStates { n: usize, max: usize },
    #[error("schema version {0} is not supported")]
    SchemaVersionUnsupported(u64),
    #[error("malformed JSON: {0}")]
    MalformedJson(String),
    #[error("unknown state label `{0}`")]
    UnknownLabel(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
