use thiserror::Error;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error("pole: {0}")]
    Pole(String),

    #[error("origin has no polar representation")]
    Origin,

    #[error("precondition: {0}")]
    Precondition(String),

    #[error("step size underflow at {at} (last reachable point)")]
    StepUnderflow { at: f64 },

    #[error("maximum step count {max_steps} exceeded at {at}")]
    TooManySteps { at: f64, max_steps: usize },

    #[error("right-hand side failed at {at}: {reason}")]
    RhsDomain { at: f64, reason: String },

    #[error("quadrature did not converge on [{a}, {b}] within depth {depth}")]
    Quadrature { a: f64, b: f64, depth: u32 },

    #[error("momentum law: L^2 vanishes near theta = {theta}")]
    MomentumZero { theta: f64 },

    #[error("state inconsistent with momentum law: relative mismatch {relative}")]
    MomentumInconsistent { relative: f64 },

    #[error("trajectory leaves the starting quadrant at t = {t}")]
    QuadrantExit { t: f64 },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("Pinney constraint violated: AC - B^2 = {lhs}, expected W^-2 = {rhs}")]
    PinneyConstraint { lhs: f64, rhs: f64 },

    #[error("sigma^2 not positive at theta = {theta}")]
    SigmaNotPositive { theta: f64 },

    #[error("transformed graph is not monotone in theta for epsilon = {epsilon}")]
    NonMonotone { epsilon: f64 },

    #[error("evaluation matrix rank {rank} < {needed}; add sample points")]
    RankDeficient { rank: usize, needed: usize },

    #[error("unknown claim id `{0}`")]
    UnknownClaim(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
