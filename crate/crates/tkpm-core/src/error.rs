use thiserror::Error;

/// Faults raised by graph construction and the solvers.
///
/// Infeasibility ("this graph has no perfect matching", "no matching hits
/// this coverage tuple") is *not* an error; solvers express it through
/// `Option`-shaped results. Everything here is a genuine contract violation.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex id {id} out of range (vertex count {count})")]
    VertexOutOfRange { id: usize, count: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("duplicate edge between {0} and {1}")]
    DuplicateEdge(usize, usize),

    #[error("weights too large: {0}")]
    InputTooLarge(String),

    #[error("edge {0} is uncolored but the operation requires red/blue colors")]
    UncoloredEdge(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("type-count tuple invalid: {0}")]
    InvalidTypeCounts(String),

    #[error("graph too large for the brute-force oracle: {vertices} vertices (limit {limit})")]
    OracleSizeExceeded { vertices: usize, limit: usize },

    #[error("prototype has {blobs} blobs; exact bandwidth search is capped at {limit} and no ordering was supplied")]
    OrderingRequired { blobs: usize, limit: usize },

    #[error("invalid prototype: {0}")]
    InvalidPrototype(String),
}

pub type Result<T> = std::result::Result<T, Error>;
