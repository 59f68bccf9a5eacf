use thiserror::Error;

/// Errors raised by ingestion, validation and the selection routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: edge weight must be finite and nonzero, got {weight}")]
    BadWeight { line: usize, weight: f64 },

    #[error("line {line}: duplicate edge ({src}, {dst})")]
    DuplicateEdge { line: usize, src: usize, dst: usize },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("line {line}: node {node} assigned to more than one group")]
    DuplicateMembership { line: usize, node: usize },

    #[error("line {line}: group must be 1 or 2, got {group}")]
    BadGroup { line: usize, group: String },

    #[error("partition vector has {got} labels, graph has {expected} nodes")]
    LengthMismatch { expected: usize, got: usize },

    #[error("partition vector has no targeted nodes")]
    NoTargets,

    #[error("opinion value {value} at node {node} outside [-1, 1]")]
    OpinionOutOfRange { node: usize, value: f64 },

    #[error("invalid campaign config: {0}")]
    InvalidConfig(String),

    #[error("budget k = {k} exceeds {available} available candidates")]
    BudgetTooLarge { k: usize, available: usize },

    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),

    #[error("invalid seed set: {0}")]
    InvalidSeedSet(String),

    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed transition dump: {0}")]
    BadDump(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
