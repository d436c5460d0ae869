use std::io;

use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for graph with {num_nodes} nodes")]
    NodeOutOfRange { node: u64, num_nodes: usize },

    #[error("pair ({0}, {0}) has identical endpoints")]
    SelfPair(NodeId),

    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },

    #[error("input contains no edges")]
    EmptyInput,

    #[error("invalid split spec: {0}")]
    InvalidSpec(String),

    #[error("training split is empty after categorization")]
    EmptyTrainSplit,

    #[error("no negative candidates available for positive ({u}, {v})")]
    NoNegativeCandidates { u: NodeId, v: NodeId },

    #[error("{0} requires at least one sample")]
    Empty(&'static str),

    #[error("distribution mass {mass} is not normalized to 1")]
    Unnormalized { mass: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no result for method {method} on split {split}")]
    MissingResult { method: String, split: String },

    #[error("missing input: {0}")]
    MissingInput(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
