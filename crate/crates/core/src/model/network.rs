use std::sync::{Arc, RwLockReadGuard, RwLockWriteGuard, Weak};

use indexmap::IndexMap;

use super::layer::validate_layer_name;
use super::{LayerMode, LayerOneMode, LayerSpec, LayerTwoMode, NodeId, Nodeset, SharedNodeset};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub enum Layer {
    OneMode(LayerOneMode),
    TwoMode(LayerTwoMode),
}

impl Layer {
    pub fn spec(&self) -> &LayerSpec {
        match self {
            Layer::OneMode(l) => l.spec(),
            Layer::TwoMode(l) => l.spec(),
        }
    }

    pub fn name(&self) -> &str {
        &self.spec().name
    }

    pub fn mode(&self) -> LayerMode {
        self.spec().mode
    }

    pub fn is_empty(&self) -> bool {
        match self {
            Layer::OneMode(l) => l.is_empty(),
            Layer::TwoMode(l) => l.is_empty(),
        }
    }

    pub fn as_one_mode(&self) -> Option<&LayerOneMode> {
        match self {
            Layer::OneMode(l) => Some(l),
            Layer::TwoMode(_) => None,
        }
    }

    pub fn as_two_mode(&self) -> Option<&LayerTwoMode> {
        match self {
            Layer::TwoMode(l) => Some(l),
            Layer::OneMode(_) => None,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match self {
            Layer::OneMode(l) => l.validate(),
            Layer::TwoMode(l) => l.validate(),
        }
    }
}

/// Read access to a nodeset; fails if the nodeset has been dropped.
pub(crate) fn read_nodeset(ns: &SharedNodeset) -> RwLockReadGuard<'_, Nodeset> {
    ns.read().unwrap_or_else(|e| e.into_inner())
}

pub(crate) fn write_nodeset(ns: &SharedNodeset) -> RwLockWriteGuard<'_, Nodeset> {
    ns.write().unwrap_or_else(|e| e.into_inner())
}

/// A set of named relation layers over a nodeset.
///
/// The network holds a weak reference: whoever created the nodeset owns it,
/// and once it is dropped every operation needing node information fails with
/// [`Error::NodesetDropped`].
#[derive(Debug, Clone)]
pub struct Network {
    nodeset: Weak<std::sync::RwLock<Nodeset>>,
    layers: IndexMap<String, Layer>,
}

impl Network {
    pub fn new(nodeset: &SharedNodeset) -> Self {
        Self {
            nodeset: Arc::downgrade(nodeset),
            layers: IndexMap::new(),
        }
    }

    pub fn nodeset(&self) -> Result<SharedNodeset> {
        self.nodeset.upgrade().ok_or(Error::NodesetDropped)
    }

    pub fn uses_nodeset(&self, ns: &SharedNodeset) -> bool {
        std::ptr::eq(self.nodeset.as_ptr(), Arc::as_ptr(ns))
    }

    pub fn add_layer(&mut self, spec: LayerSpec) -> Result<()> {
        if self.layers.contains_key(&spec.name) {
            return Err(Error::DuplicateLayer(spec.name));
        }
        validate_layer_name(&spec.name)?;
        let layer = match spec.mode {
            LayerMode::OneMode => Layer::OneMode(LayerOneMode::new(spec)),
            LayerMode::TwoMode => Layer::TwoMode(LayerTwoMode::new(spec)),
        };
        self.layers.insert(layer.name().to_string(), layer);
        Ok(())
    }

    pub fn remove_layer(&mut self, name: &str) -> Result<Layer> {
        self.layers
            .shift_remove(name)
            .ok_or_else(|| Error::UnknownLayer(name.to_string()))
    }

    pub fn layer(&self, name: &str) -> Result<&Layer> {
        self.layers
            .get(name)
            .ok_or_else(|| Error::UnknownLayer(name.to_string()))
    }

    pub(crate) fn layer_mut(&mut self, name: &str) -> Result<&mut Layer> {
        self.layers
            .get_mut(name)
            .ok_or_else(|| Error::UnknownLayer(name.to_string()))
    }

    /// Layers in insertion order.
    pub fn layers(&self) -> impl Iterator<Item = &Layer> {
        self.layers.values()
    }

    pub fn layer_names(&self) -> impl Iterator<Item = &str> {
        self.layers.keys().map(String::as_str)
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn one_mode(&self, name: &str) -> Result<&LayerOneMode> {
        match self.layer(name)? {
            Layer::OneMode(l) => Ok(l),
            Layer::TwoMode(_) => Err(wrong_mode(name, LayerMode::OneMode)),
        }
    }

    pub fn two_mode(&self, name: &str) -> Result<&LayerTwoMode> {
        match self.layer(name)? {
            Layer::TwoMode(l) => Ok(l),
            Layer::OneMode(_) => Err(wrong_mode(name, LayerMode::TwoMode)),
        }
    }

    pub(crate) fn one_mode_mut(&mut self, name: &str) -> Result<&mut LayerOneMode> {
        match self.layer_mut(name)? {
            Layer::OneMode(l) => Ok(l),
            Layer::TwoMode(_) => Err(wrong_mode(name, LayerMode::OneMode)),
        }
    }

    pub(crate) fn two_mode_mut(&mut self, name: &str) -> Result<&mut LayerTwoMode> {
        match self.layer_mut(name)? {
            Layer::TwoMode(l) => Ok(l),
            Layer::OneMode(_) => Err(wrong_mode(name, LayerMode::TwoMode)),
        }
    }

    /// Adds (or overwrites) an edge in a one-mode layer. Binary layers ignore
    /// `value`.
    pub fn add_edge(&mut self, layer: &str, a: NodeId, b: NodeId, value: f32) -> Result<()> {
        let ns = self.nodeset()?;
        let l = self.one_mode_mut(layer)?;
        {
            let ns = read_nodeset(&ns);
            ns.ensure_node(a)?;
            ns.ensure_node(b)?;
        }
        l.check_insert(a, b, value)?;
        l.insert_edge(a, b, value);
        Ok(())
    }

    /// Removing an absent edge is a no-op.
    pub fn remove_edge(&mut self, layer: &str, a: NodeId, b: NodeId) -> Result<()> {
        self.one_mode_mut(layer)?.delete_edge(a, b);
        Ok(())
    }

    /// Creates a hyperedge. Repeated members are stored once.
    pub fn add_hyperedge(&mut self, layer: &str, name: &str, members: &[NodeId]) -> Result<()> {
        let ns = self.nodeset()?;
        let l = self.two_mode_mut(layer)?;
        {
            let ns = read_nodeset(&ns);
            for &m in members {
                ns.ensure_node(m)?;
            }
        }
        let id = l.create_hyperedge(name)?;
        let mut sorted = members.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        for m in sorted {
            l.join(id, m);
        }
        Ok(())
    }

    pub fn add_to_hyperedge(&mut self, layer: &str, name: &str, node: NodeId) -> Result<()> {
        let ns = self.nodeset()?;
        let l = self.two_mode_mut(layer)?;
        let id = l.hyperedge_id(name)?;
        read_nodeset(&ns).ensure_node(node)?;
        l.join(id, node);
        Ok(())
    }

    pub fn remove_from_hyperedge(&mut self, layer: &str, name: &str, node: NodeId) -> Result<()> {
        let ns = self.nodeset()?;
        let l = self.two_mode_mut(layer)?;
        let id = l.hyperedge_id(name)?;
        read_nodeset(&ns).ensure_node(node)?;
        l.leave(id, node);
        Ok(())
    }

    /// Removes every edge or hyperedge from a layer, keeping its configuration.
    pub fn clear_layer(&mut self, layer: &str) -> Result<()> {
        match self.layer_mut(layer)? {
            Layer::OneMode(l) => l.clear(),
            Layer::TwoMode(l) => l.clear(),
        }
        Ok(())
    }

    /// Checks every layer's storage invariants and that all endpoints exist in
    /// the nodeset.
    pub fn validate(&self) -> Result<(), String> {
        let ns = self.nodeset().map_err(|e| e.to_string())?;
        let ns = read_nodeset(&ns);
        for layer in self.layers() {
            layer.validate()?;
            match layer {
                Layer::OneMode(l) => {
                    let mut missing = None;
                    l.for_each_edge(|a, b, _| {
                        if missing.is_none() {
                            missing = [a, b].into_iter().find(|n| !ns.contains(*n));
                        }
                    });
                    if let Some(n) = missing {
                        return Err(format!("{}: endpoint {n} not in nodeset", l.name()));
                    }
                }
                Layer::TwoMode(l) => {
                    if let Some(n) = l.memberships.keys().find(|n| !ns.contains(**n)) {
                        return Err(format!("{}: member {n} not in nodeset", l.name()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Extensional equality of layer contents and configuration (nodesets are
    /// compared separately).
    pub fn same_layers(&self, other: &Network) -> bool {
        self.layers.len() == other.layers.len()
            && self.layers().zip(other.layers()).all(|(a, b)| same_layer(a, b))
    }
}

fn same_layer(a: &Layer, b: &Layer) -> bool {
    if a.spec() != b.spec() {
        return false;
    }
    match (a, b) {
        (Layer::OneMode(x), Layer::OneMode(y)) => {
            x.edge_count() == y.edge_count()
                && x.edges()
                    .iter()
                    .zip(y.edges().iter())
                    .all(|(e, f)| e.0 == f.0 && e.1 == f.1 && e.2.to_bits() == f.2.to_bits())
        }
        (Layer::TwoMode(x), Layer::TwoMode(y)) => {
            if x.hyperedge_count() != y.hyperedge_count() || x.membership_count() != y.membership_count() {
                return false;
            }
            x.hyperedges()
                .iter()
                .all(|h| y.hyperedge(h.name()).is_some_and(|g| g.members() == h.members()))
        }
        _ => false,
    }
}

fn wrong_mode(layer: &str, expected: LayerMode) -> Error {
    Error::WrongLayerMode {
        layer: layer.to_string(),
        expected,
    }
}
