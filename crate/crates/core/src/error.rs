use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("ball addition amount must be at least 1 (got a = {0})")]
    NonPositiveAddition(u64),

    #[error("differential index must be at least 1 for tenability (got delta = {0})")]
    NonPositiveDifferential(u64),

    #[error("initial white count {w0} is not a multiple of a = {a}; a white draw could leave a negative count")]
    IndivisibleInitialWhite { w0: u64, a: u64 },

    #[error("untenable white draw from (white = {white}, blue = {blue}) with a = {a}")]
    UntenableDraw { white: u64, blue: u64, a: u64 },

    #[error("urn is empty")]
    EmptyUrn,

    #[error("ball count overflow while simulating")]
    OverflowAbort,

    #[error("invalid horizon {0}: must be finite and positive")]
    InvalidHorizon(f64),

    #[error("time {t} is outside the recorded horizon [0, {horizon}]")]
    OutOfHorizon { t: f64, horizon: f64 },

    #[error("out of domain: {0}")]
    OutOfDomain(String),

    #[error("step count {steps} too small: step-doubling error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    StepCountTooSmall {
        steps: usize,
        estimate: f64,
        tolerance: f64,
    },

    #[error("too few trials: got {got}, need at least {need}")]
    TooFewTrials { got: usize, need: usize },

    #[error("configuration error: {0}")]
    Config(String),
}
