use std::path::PathBuf;

use crate::model::{AttributeKind, LayerMode, NodeId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("node {0} already exists")]
    DuplicateNode(NodeId),
    #[error("node {0} does not exist")]
    UnknownNode(NodeId),
    #[error("attribute '{name}' holds {expected} values, got {found}")]
    TypeMismatch {
        name: String,
        expected: AttributeKind,
        found: AttributeKind,
    },
    #[error("unknown attribute '{0}'")]
    UnknownAttribute(String),
    #[error("too many attribute names (limit is {limit})")]
    TooManyAttributes { limit: usize },
    #[error("invalid name {0:?}")]
    InvalidName(String),

    #[error("layer '{0}' already exists")]
    DuplicateLayer(String),
    #[error("unknown layer '{0}'")]
    UnknownLayer(String),
    #[error("layer '{layer}' is not a {expected} layer")]
    WrongLayerMode { layer: String, expected: LayerMode },
    #[error("layer '{0}' does not allow self-ties (node {1})")]
    SelfTieForbidden(String, NodeId),
    #[error("layer '{0}' does not store inbound edges")]
    InboundUnavailable(String),
    #[error("layer '{0}' is not empty")]
    NonEmptyLayer(String),
    #[error("edge value {0} is not finite")]
    NonFiniteValue(f32),
    #[error("hyperedge '{0}' already exists")]
    DuplicateHyperedge(String),
    #[error("unknown hyperedge '{0}'")]
    UnknownHyperedge(String),
    #[error("the nodeset referenced by this network no longer exists")]
    NodesetDropped,

    #[error("arithmetic overflow while computing {0}")]
    ArithmeticOverflow(&'static str),
    #[error("k must be even, positive and smaller than the node count (k = {k}, n = {n})")]
    InvalidK { k: u64, n: u64 },
    #[error("m must be positive and smaller than the node count (m = {m}, n = {n})")]
    InvalidM { m: u64, n: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("symmetrize method {method} is not supported on {layer_kind} layers")]
    UnsupportedMethod {
        method: &'static str,
        layer_kind: &'static str,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("cannot infer file format from {0:?} (expected .tsv, .tsv.gz, .bin or .bin.gz)")]
    UnknownFormat(PathBuf),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: {message}")]
    TypeParse { line: usize, message: String },
    #[error("line {line}: node {node} is not in the nodeset")]
    UnknownNodeInEdge { line: usize, node: NodeId },
    #[error("line {line}: {message}")]
    MalformedSection { line: usize, message: String },
    #[error("line {line}: unknown layer header key '{key}'")]
    UnknownLayerHeaderKey { line: usize, key: String },
    #[error("corrupt binary file: {0}")]
    CorruptBinary(String),
}
