//! Nodesets, networks and the two kinds of layers.

mod layer;
mod network;
mod nodeset;
mod twomode;

pub use layer::{LayerMode, LayerOneMode, LayerSpec, Traversal};
pub use network::{Layer, Network};
pub use nodeset::{AttributeDef, AttributeKind, AttributeValue, NodeId, Nodeset, SharedNodeset};
pub use twomode::{Hyperedge, HyperedgeId, LayerTwoMode};

pub(crate) use layer::{with_adjacency, EdgeStore};
pub(crate) use network::{read_nodeset, write_nodeset};
