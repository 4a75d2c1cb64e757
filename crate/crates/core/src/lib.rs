//! In-memory multilayer networks.
//!
//! A [`Nodeset`](model::Nodeset) holds nodes and their sparse attributes. A
//! [`Network`](model::Network) refers to one nodeset and carries any number of
//! named layers. One-mode layers store ties as adjacency lists. Two-mode layers
//! store hyperedges (affiliations) and answer node-to-node queries as if the
//! one-mode projection existed, without ever building it.

pub mod error;
pub mod generators;
pub mod io;
pub mod model;
pub mod processing;
pub mod query;

pub use error::{Error, Result};
pub use model::{
    AttributeKind, AttributeValue, Layer, LayerMode, LayerOneMode, LayerSpec, LayerTwoMode, Network, NodeId,
    Nodeset, SharedNodeset, Traversal,
};
pub use query::{LayerQuery, LayerSelection};
