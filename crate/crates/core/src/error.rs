use thiserror::Error;

/// Errors raised by state construction, measures, optimizers and verifiers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A parameter lies outside the region where a formula or inequality is stated.
    /// `constraint` names the violated inequality.
    #[error("domain error: (q, s) = ({q}, {s}) violates {constraint}")]
    Domain { q: f64, s: f64, constraint: String },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("rank {rank} out of bounds 1..={max}")]
    RankOutOfBounds { rank: usize, max: usize },

    #[error("mixer is not an isometry (deviation {0:e})")]
    NonIsometricMixer(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown {kind} '{name}' (known: {known})")]
    UnknownName {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("optimizer failure: {0}")]
    Optimizer(String),

    /// Two routes that must agree by construction disagreed.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(q: f64, s: f64, constraint: impl Into<String>) -> Self {
        Error::Domain {
            q,
            s,
            constraint: constraint.into(),
        }
    }

    /// True for errors caused by bad user input (usage, domain, malformed config),
    /// as opposed to I/O failures.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
