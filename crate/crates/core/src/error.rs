use thiserror::Error;

use crate::purify::FlawReport;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// The graph violates a structural requirement (missing begin/end, no
    /// entry node, empty node set, ...).
    #[error("structural error: {0}")]
    Structural(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("unsupported construct: {0}")]
    Unsupported(String),

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("no path from begin to end")]
    NoPath,

    /// A back edge whose target does not dominate its source reached an
    /// algorithm that requires a reducible graph.
    #[error("irreducible control flow at edge {0}")]
    Irreducible(usize),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("no independent substitute among {candidates} candidates (span deficit {deficit})")]
    NoIndependentSubstitute { candidates: usize, deficit: usize },

    #[error("path budget of {budget} exhausted at rank {rank} of {target}")]
    BudgetExhausted {
        budget: usize,
        rank: usize,
        target: usize,
    },
}

impl Error {
    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failure of the end-to-end planning pipeline.
#[derive(Debug, Error, Clone)]
pub enum PipelineError {
    #[error(transparent)]
    Graph(#[from] Error),

    /// Purification left blocking design flaws; no plan is produced.
    #[error("blocking design flaws: {}", .0.summary())]
    Blocked(FlawReport),
}
