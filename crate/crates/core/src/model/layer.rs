use std::collections::HashMap;
use std::fmt;

use super::NodeId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LayerMode {
    OneMode,
    TwoMode,
}

impl LayerMode {
    /// The numeric form used by scripts and file headers (1 or 2).
    pub fn number(&self) -> u8 {
        match self {
            LayerMode::OneMode => 1,
            LayerMode::TwoMode => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(LayerMode::OneMode),
            2 => Some(LayerMode::TwoMode),
            _ => None,
        }
    }
}

impl fmt::Display for LayerMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LayerMode::OneMode => f.write_str("one-mode"),
            LayerMode::TwoMode => f.write_str("two-mode"),
        }
    }
}

/// Which incident edges of a node a query follows on directed layers.
/// Symmetric and two-mode layers treat every variant as `Both`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Traversal {
    #[default]
    Both,
    Out,
    In,
}

impl Traversal {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "both" => Some(Traversal::Both),
            "out" => Some(Traversal::Out),
            "in" => Some(Traversal::In),
            _ => None,
        }
    }
}

/// Layer configuration. Flags other than `name` and `mode` only apply to
/// one-mode layers; `store_inbound` only to directed ones.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerSpec {
    pub name: String,
    pub mode: LayerMode,
    pub directed: bool,
    pub valued: bool,
    pub allow_self_ties: bool,
    pub store_inbound: bool,
}

impl LayerSpec {
    /// A symmetric, binary one-mode layer without self-ties.
    pub fn one_mode(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            mode: LayerMode::OneMode,
            directed: false,
            valued: false,
            allow_self_ties: false,
            store_inbound: true,
        }
    }

    pub fn two_mode(name: impl Into<String>) -> Self {
        Self {
            mode: LayerMode::TwoMode,
            ..Self::one_mode(name)
        }
    }

    pub fn directed(mut self, directed: bool) -> Self {
        self.directed = directed;
        self
    }

    pub fn valued(mut self, valued: bool) -> Self {
        self.valued = valued;
        self
    }

    pub fn self_ties(mut self, allow: bool) -> Self {
        self.allow_self_ties = allow;
        self
    }

    pub fn store_inbound(mut self, store: bool) -> Self {
        self.store_inbound = store;
        self
    }

    /// Clears the one-mode flags on two-mode specs so equal layers compare equal.
    pub(crate) fn normalized(mut self) -> Self {
        if self.mode == LayerMode::TwoMode {
            self.directed = false;
            self.valued = false;
            self.allow_self_ties = false;
            self.store_inbound = true;
        } else if !self.directed {
            self.store_inbound = true;
        }
        self
    }

    pub(crate) fn keeps_inbound(&self) -> bool {
        self.directed && self.store_inbound
    }
}

pub(crate) fn validate_layer_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains(['\t', '\n', '\r']) || name.len() > u16::MAX as usize {
        return Err(Error::InvalidName(name.to_string()));
    }
    Ok(())
}

/// Per-edge payload: `()` for binary layers, `f32` for valued ones.
pub(crate) trait EdgeValue: Copy + fmt::Debug + PartialEq {
    fn as_f32(self) -> f32;
}

impl EdgeValue for () {
    fn as_f32(self) -> f32 {
        1.0
    }
}

impl EdgeValue for f32 {
    fn as_f32(self) -> f32 {
        self
    }
}

type EdgeList<V> = Vec<(NodeId, V)>;

/// Sorted neighbor lists keyed by node. Nodes without edges have no entry.
#[derive(Debug, Clone, Default)]
pub(crate) struct Adjacency<V> {
    pub(crate) out: HashMap<NodeId, EdgeList<V>>,
    pub(crate) inbound: Option<HashMap<NodeId, EdgeList<V>>>,
}

fn list_insert<V: EdgeValue>(map: &mut HashMap<NodeId, EdgeList<V>>, from: NodeId, to: NodeId, v: V) -> bool {
    let list = map.entry(from).or_default();
    match list.binary_search_by_key(&to, |e| e.0) {
        Ok(pos) => {
            list[pos].1 = v;
            false
        }
        Err(pos) => {
            list.insert(pos, (to, v));
            true
        }
    }
}

fn list_remove<V>(map: &mut HashMap<NodeId, EdgeList<V>>, from: NodeId, to: NodeId) -> bool {
    let Some(list) = map.get_mut(&from) else {
        return false;
    };
    match list.binary_search_by_key(&to, |e| e.0) {
        Ok(pos) => {
            list.remove(pos);
            if list.is_empty() {
                map.remove(&from);
            }
            true
        }
        Err(_) => false,
    }
}

fn list_get<V: Copy>(map: &HashMap<NodeId, EdgeList<V>>, from: NodeId, to: NodeId) -> Option<V> {
    let list = map.get(&from)?;
    list.binary_search_by_key(&to, |e| e.0).ok().map(|pos| list[pos].1)
}

impl<V: EdgeValue> Adjacency<V> {
    pub(crate) fn new(with_inbound: bool) -> Self {
        Self {
            out: HashMap::new(),
            inbound: with_inbound.then(HashMap::new),
        }
    }

    /// Returns true when the edge did not exist before.
    pub(crate) fn insert(&mut self, a: NodeId, b: NodeId, v: V, symmetric: bool) -> bool {
        let added = list_insert(&mut self.out, a, b, v);
        if symmetric {
            if a != b {
                list_insert(&mut self.out, b, a, v);
            }
        } else if let Some(inbound) = &mut self.inbound {
            list_insert(inbound, b, a, v);
        }
        added
    }

    pub(crate) fn remove(&mut self, a: NodeId, b: NodeId, symmetric: bool) -> bool {
        let removed = list_remove(&mut self.out, a, b);
        if removed {
            if symmetric {
                if a != b {
                    list_remove(&mut self.out, b, a);
                }
            } else if let Some(inbound) = &mut self.inbound {
                list_remove(inbound, b, a);
            }
        }
        removed
    }

    pub(crate) fn get(&self, a: NodeId, b: NodeId) -> Option<V> {
        list_get(&self.out, a, b)
    }

    pub(crate) fn out_list(&self, a: NodeId) -> &[(NodeId, V)] {
        self.out.get(&a).map(Vec::as_slice).unwrap_or(&[])
    }

    pub(crate) fn in_list(&self, a: NodeId) -> Option<&[(NodeId, V)]> {
        self.inbound
            .as_ref()
            .map(|m| m.get(&a).map(Vec::as_slice).unwrap_or(&[]))
    }

    pub(crate) fn sorted_sources(&self) -> Vec<NodeId> {
        let mut keys: Vec<NodeId> = self.out.keys().copied().collect();
        keys.sort_unstable();
        keys
    }

    /// Visits stored edges in ascending (source, target) order. Symmetric
    /// layers yield each edge once with `source <= target`.
    pub(crate) fn for_each_edge(&self, symmetric: bool, mut f: impl FnMut(NodeId, NodeId, V)) {
        for a in self.sorted_sources() {
            for &(b, v) in &self.out[&a] {
                if !symmetric || a <= b {
                    f(a, b, v);
                }
            }
        }
    }

    fn map_values<W: EdgeValue>(&self, f: impl Fn(V) -> W) -> Adjacency<W> {
        let conv = |m: &HashMap<NodeId, EdgeList<V>>| {
            m.iter()
                .map(|(&k, list)| (k, list.iter().map(|&(n, v)| (n, f(v))).collect()))
                .collect()
        };
        Adjacency {
            out: conv(&self.out),
            inbound: self.inbound.as_ref().map(conv),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) enum EdgeStore {
    Binary(Adjacency<()>),
    Valued(Adjacency<f32>),
}

macro_rules! with_adjacency {
    ($store:expr, $adj:ident => $body:expr) => {
        match $store {
            EdgeStore::Binary($adj) => $body,
            EdgeStore::Valued($adj) => $body,
        }
    };
}
pub(crate) use with_adjacency;

/// A one-mode layer: node-to-node edges stored as per-node neighbor lists.
#[derive(Debug, Clone)]
pub struct LayerOneMode {
    spec: LayerSpec,
    pub(crate) store: EdgeStore,
    edge_count: u64,
}

impl LayerOneMode {
    pub(crate) fn new(spec: LayerSpec) -> Self {
        let spec = spec.normalized();
        let with_inbound = spec.keeps_inbound();
        let store = if spec.valued {
            EdgeStore::Valued(Adjacency::new(with_inbound))
        } else {
            EdgeStore::Binary(Adjacency::new(with_inbound))
        };
        Self {
            spec,
            store,
            edge_count: 0,
        }
    }

    pub fn spec(&self) -> &LayerSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn is_directed(&self) -> bool {
        self.spec.directed
    }

    pub fn is_valued(&self) -> bool {
        self.spec.valued
    }

    pub fn has_inbound(&self) -> bool {
        with_adjacency!(&self.store, adj => adj.inbound.is_some())
    }

    /// Number of edges; a symmetric edge counts once.
    pub fn edge_count(&self) -> u64 {
        self.edge_count
    }

    pub fn is_empty(&self) -> bool {
        self.edge_count == 0
    }

    /// Inserts or overwrites an edge without checking node existence or
    /// self-tie policy. Binary layers ignore `value`.
    pub(crate) fn insert_edge(&mut self, a: NodeId, b: NodeId, value: f32) -> bool {
        let symmetric = !self.spec.directed;
        let added = match &mut self.store {
            EdgeStore::Binary(adj) => adj.insert(a, b, (), symmetric),
            EdgeStore::Valued(adj) => adj.insert(a, b, value, symmetric),
        };
        if added {
            self.edge_count += 1;
        }
        added
    }

    pub(crate) fn delete_edge(&mut self, a: NodeId, b: NodeId) -> bool {
        let symmetric = !self.spec.directed;
        let removed = with_adjacency!(&mut self.store, adj => adj.remove(a, b, symmetric));
        if removed {
            self.edge_count -= 1;
        }
        removed
    }

    pub(crate) fn check_insert(&self, a: NodeId, b: NodeId, value: f32) -> Result<()> {
        if a == b && !self.spec.allow_self_ties {
            return Err(Error::SelfTieForbidden(self.spec.name.clone(), a));
        }
        if self.spec.valued && !value.is_finite() {
            return Err(Error::NonFiniteValue(value));
        }
        Ok(())
    }

    /// Value of the stored edge `a -> b` (either direction on symmetric layers).
    pub fn edge_value(&self, a: NodeId, b: NodeId) -> Option<f32> {
        with_adjacency!(&self.store, adj => adj.get(a, b).map(EdgeValue::as_f32))
    }

    /// Outbound neighbors with values (all neighbors on symmetric layers).
    pub fn out_edges(&self, node: NodeId) -> Vec<(NodeId, f32)> {
        with_adjacency!(&self.store, adj => adj.out_list(node).iter().map(|&(n, v)| (n, v.as_f32())).collect())
    }

    pub(crate) fn out_degree(&self, node: NodeId) -> usize {
        with_adjacency!(&self.store, adj => adj.out_list(node).len())
    }

    /// Visits every edge once in canonical order: ascending source, then target;
    /// symmetric layers report each edge with the smaller endpoint first.
    pub fn for_each_edge(&self, mut f: impl FnMut(NodeId, NodeId, f32)) {
        let symmetric = !self.spec.directed;
        with_adjacency!(&self.store, adj => adj.for_each_edge(symmetric, |a, b, v| f(a, b, v.as_f32())))
    }

    pub fn edges(&self) -> Vec<(NodeId, NodeId, f32)> {
        let mut out = Vec::with_capacity(self.edge_count as usize);
        self.for_each_edge(|a, b, v| out.push((a, b, v)));
        out
    }

    pub(crate) fn clear(&mut self) {
        *self = LayerOneMode::new(self.spec.clone());
    }

    /// Rebuilds the layer with a different configuration from a list of edges.
    pub(crate) fn rebuild(&mut self, spec: LayerSpec, edges: impl IntoIterator<Item = (NodeId, NodeId, f32)>) {
        let mut layer = LayerOneMode::new(spec);
        for (a, b, v) in edges {
            layer.insert_edge(a, b, v);
        }
        *self = layer;
    }

    /// Converts a valued layer to binary in place, keeping its edges.
    pub(crate) fn make_binary(&mut self) {
        if let EdgeStore::Valued(adj) = &self.store {
            self.store = EdgeStore::Binary(adj.map_values(|_| ()));
        }
        self.spec.valued = false;
    }

    /// Checks the storage invariants; returns a description of the first
    /// violation found.
    pub fn validate(&self) -> Result<(), String> {
        let symmetric = !self.spec.directed;
        let name = &self.spec.name;
        with_adjacency!(&self.store, adj => {
            let mut count = 0u64;
            for (&a, list) in &adj.out {
                if list.is_empty() {
                    return Err(format!("{name}: empty list for node {a}"));
                }
                if !list.windows(2).all(|w| w[0].0 < w[1].0) {
                    return Err(format!("{name}: unsorted list for node {a}"));
                }
                for &(b, v) in list {
                    if a == b && !self.spec.allow_self_ties {
                        return Err(format!("{name}: self-tie on {a}"));
                    }
                    if !v.as_f32().is_finite() {
                        return Err(format!("{name}: non-finite value on {a}-{b}"));
                    }
                    if symmetric {
                        if adj.get(b, a) != Some(v) {
                            return Err(format!("{name}: edge {a}-{b} not mirrored"));
                        }
                        if a <= b {
                            count += 1;
                        }
                    } else {
                        count += 1;
                        if let Some(inbound) = &adj.inbound {
                            if list_get(inbound, b, a) != Some(v) {
                                return Err(format!("{name}: edge {a}->{b} missing from inbound index"));
                            }
                        }
                    }
                }
            }
            if let Some(inbound) = &adj.inbound {
                if symmetric {
                    return Err(format!("{name}: symmetric layer keeps an inbound index"));
                }
                let mut in_count = 0u64;
                for (&b, list) in inbound {
                    if list.is_empty() {
                        return Err(format!("{name}: empty inbound list for node {b}"));
                    }
                    for &(a, v) in list {
                        in_count += 1;
                        if adj.get(a, b) != Some(v) {
                            return Err(format!("{name}: inbound {a}->{b} has no outbound twin"));
                        }
                    }
                }
                if in_count != count {
                    return Err(format!("{name}: inbound index holds {in_count} edges, outbound {count}"));
                }
            }
            if count != self.edge_count {
                return Err(format!("{name}: edge count {} but {count} stored", self.edge_count));
            }
            Ok(())
        })
    }
}
