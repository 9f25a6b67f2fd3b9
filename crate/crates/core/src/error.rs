use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("self-loop on node {0} is not allowed")]
    SelfLoop(NodeId),

    #[error("node {node} is out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },

    #[error("edge weight must be finite and strictly positive, got {0}")]
    InvalidWeight(f64),

    #[error("node set must not be empty")]
    EmptyNodeSet,

    #[error("search budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("ambiguous result: {0}")]
    Ambiguous(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("graph is not at equilibrium")]
    NotAtEquilibrium,

    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("infeasible request: {0}")]
    Infeasible(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
