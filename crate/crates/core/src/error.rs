use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("a stream needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),

    #[error("number of streams must be 1 or 2, got {0}")]
    StreamCount(usize),

    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("{name} = {value} is outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("distance {distance} m is below the {reference} m reference distance")]
    BelowReferenceDistance { distance: f64, reference: f64 },

    #[error("invalid route: {0}")]
    Route(String),

    #[error("schedule period must be at least 2, got {0}")]
    Period(usize),

    #[error("schedule does not match the routes: {0}")]
    ScheduleMismatch(String),

    #[error("empty scheduling period range")]
    EmptyRange,

    #[error("need at least {needed} steady-state deliveries, trace has {found}")]
    InsufficientDeliveries { needed: usize, found: usize },

    #[error("steady-state latency is not constant: saw {first} and {other} timeslots")]
    UnstableLatency { first: u64, other: u64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("invalid experiment: {0}")]
    Experiment(String),

    #[error("cross-engine consistency failure: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Consistency(_) => 2,
            _ => 1,
        }
    }
}
