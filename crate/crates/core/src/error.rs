use std::path::PathBuf;

use thiserror::Error;

use crate::flowstate::FlowId;
use crate::topology::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("GML parse error at byte {offset}: {message}")]
    Gml { offset: usize, message: String },

    #[error("edge list parse error on line {line}: {message}")]
    EdgeList { line: usize, message: String },

    #[error("unknown topology `{name}` (valid: {valid})")]
    UnknownTopology { name: String, valid: String },

    #[error("node {node} is not part of topology `{topology}`")]
    UnknownNode { node: NodeId, topology: String },

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("source and destination must differ (got {0} -> {0})")]
    SameEndpoints(NodeId),

    #[error("no path from {src} to {dst}")]
    NoPath { src: NodeId, dst: NodeId },

    #[error("flow {0} is already admitted")]
    DuplicateFlow(FlowId),

    #[error("flow {0} is unknown")]
    UnknownFlow(FlowId),

    #[error("path {path_src}->{path_dst} does not match flow {id} endpoints {src}->{dst}")]
    PathMismatch {
        id: FlowId,
        src: NodeId,
        dst: NodeId,
        path_src: NodeId,
        path_dst: NodeId,
    },

    #[error("flow {0} has no remaining data units")]
    FlowFinished(FlowId),

    #[error("flow {0} has not finished")]
    FlowNotFinished(FlowId),

    #[error("flow {id} must have volume >= 1 and remaining == volume on admission")]
    InvalidVolume { id: FlowId },

    #[error("heuristic weight {heuristic} is below optimal weight {optimal}")]
    GapInversion { heuristic: u64, optimal: u64 },

    #[error("optimality gap is unbounded: heuristic weight {heuristic} against an optimum of 0")]
    UndefinedGap { heuristic: u64 },

    #[error("exact search exceeded its time budget of {0:?}")]
    Timeout(std::time::Duration),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("trace error on line {line}: {message}")]
    Trace { line: usize, message: String },

    #[error("routing flow {flow} ({src}->{dst}, arrival slot {slot}) failed: {source}")]
    Admission {
        flow: FlowId,
        src: NodeId,
        dst: NodeId,
        slot: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
