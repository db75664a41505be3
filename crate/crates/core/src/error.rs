use thiserror::Error;

use crate::graph::{EdgeId, VertexId};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("nonpositive length {length} on edge {edge} (line {line})")]
    NonpositiveLength {
        line: usize,
        edge: EdgeId,
        length: f64,
    },

    #[error("self-loop on vertex {vertex} (line {line})")]
    SelfLoop { line: usize, vertex: VertexId },

    #[error("vertex {vertex} out of range for {n} vertices")]
    VertexOutOfRange { vertex: VertexId, n: usize },

    #[error("disconnected demand: vertex {vertex} is not reachable from the root")]
    DisconnectedDemand { vertex: VertexId },

    #[error("instance has no demand")]
    NoDemand,

    #[error("graph is disconnected")]
    Disconnected,

    #[error("edge set is not a routing tree: {0}")]
    NotATree(String),

    #[error("instance too large for oracle: about {estimate:.3e} spanning trees (limit {limit:.0e})")]
    OracleTooLarge { estimate: f64, limit: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("invalid cost function: {0}")]
    InvalidFunction(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Validation problems with the input map to exit code 2, broken
    /// internal invariants to 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 3,
            _ => 2,
        }
    }
}
