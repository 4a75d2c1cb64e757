//! Edge queries shared by one-mode and two-mode layers.
//!
//! Two-mode layers answer the same questions as one-mode layers by looking at
//! hyperedge memberships: two nodes are adjacent when they share a hyperedge,
//! the edge value is the number of shared hyperedges, and the alters of a node
//! are its co-members. Nothing pairwise is ever materialized.

mod analysis;

pub use analysis::{
    connected_components, degree, density, shortest_path, summarize_attribute, AttributeSummary, Components,
    PathResult,
};

use crate::error::{Error, Result};
use crate::model::{read_nodeset, with_adjacency, EdgeStore, Layer, LayerOneMode, LayerTwoMode, Network, NodeId, Traversal};

/// The query surface common to every layer kind.
pub trait LayerQuery {
    /// Whether `a` and `b` are adjacent. On directed layers `traversal` picks
    /// `a -> b` (Out), `b -> a` (In) or either (Both).
    fn check_edge_exists(&self, a: NodeId, b: NodeId, traversal: Traversal) -> bool;

    /// Value of the edge `a -> b`, or 0.0 when absent. Binary layers yield 1.0
    /// for present edges; two-mode layers the number of shared hyperedges.
    fn get_edge_value(&self, a: NodeId, b: NodeId) -> f32;

    /// Neighbors of `node`, ascending and without duplicates.
    fn get_node_alters(&self, node: NodeId, traversal: Traversal) -> Result<Vec<NodeId>>;
}

impl LayerQuery for LayerOneMode {
    fn check_edge_exists(&self, a: NodeId, b: NodeId, traversal: Traversal) -> bool {
        if !self.is_directed() {
            return self.edge_value(a, b).is_some();
        }
        match traversal {
            Traversal::Out => self.edge_value(a, b).is_some(),
            Traversal::In => self.edge_value(b, a).is_some(),
            Traversal::Both => self.edge_value(a, b).is_some() || self.edge_value(b, a).is_some(),
        }
    }

    fn get_edge_value(&self, a: NodeId, b: NodeId) -> f32 {
        self.edge_value(a, b).unwrap_or(0.0)
    }

    fn get_node_alters(&self, node: NodeId, traversal: Traversal) -> Result<Vec<NodeId>> {
        let traversal = if self.is_directed() { traversal } else { Traversal::Out };
        with_adjacency!(&self.store, adj => {
            let out = || adj.out_list(node).iter().map(|e| e.0);
            let inbound = || adj.in_list(node).ok_or_else(|| Error::InboundUnavailable(self.name().to_string()));
            Ok(match traversal {
                Traversal::Out => out().collect(),
                Traversal::In => inbound()?.iter().map(|e| e.0).collect(),
                Traversal::Both => {
                    let inb = inbound()?;
                    let mut all: Vec<NodeId> = out().chain(inb.iter().map(|e| e.0)).collect();
                    all.sort_unstable();
                    all.dedup();
                    all
                }
            })
        })
    }
}

impl LayerTwoMode {
    /// Existence check that also counts membership probes: each hyperedge of
    /// the node with fewer memberships is looked up once in the other node's
    /// memberships, stopping at the first hit.
    pub fn check_edge_exists_probed(&self, a: NodeId, b: NodeId, probes: &mut u64) -> bool {
        let (small, large) = self.ordered_memberships(a, b);
        for id in small {
            *probes += 1;
            if large.binary_search(id).is_ok() {
                return true;
            }
        }
        false
    }

    /// Shared-hyperedge count with the same probe accounting as
    /// [`check_edge_exists_probed`](Self::check_edge_exists_probed).
    pub fn get_edge_value_probed(&self, a: NodeId, b: NodeId, probes: &mut u64) -> f32 {
        let (small, large) = self.ordered_memberships(a, b);
        let mut shared = 0u32;
        for id in small {
            *probes += 1;
            if large.binary_search(id).is_ok() {
                shared += 1;
            }
        }
        shared as f32
    }

    fn ordered_memberships(&self, a: NodeId, b: NodeId) -> (&[u32], &[u32]) {
        let ma = self.memberships_of(a);
        let mb = self.memberships_of(b);
        if ma.is_empty() || mb.is_empty() {
            return (&[], &[]);
        }
        if ma.len() <= mb.len() {
            (ma, mb)
        } else {
            (mb, ma)
        }
    }

    /// Number of edges a full one-mode projection would contain, counting a
    /// pair once per hyperedge it shares.
    pub fn projected_edge_count(&self) -> Result<u64> {
        projected_edge_count_from_sizes(self.hyperedges().iter().map(|h| h.len() as u64))
    }
}

impl LayerQuery for LayerTwoMode {
    fn check_edge_exists(&self, a: NodeId, b: NodeId, _: Traversal) -> bool {
        self.check_edge_exists_probed(a, b, &mut 0)
    }

    fn get_edge_value(&self, a: NodeId, b: NodeId) -> f32 {
        self.get_edge_value_probed(a, b, &mut 0)
    }

    fn get_node_alters(&self, node: NodeId, _: Traversal) -> Result<Vec<NodeId>> {
        let hyperedges = self.memberships_of(node);
        let mut alters: Vec<NodeId> = Vec::new();
        for &id in hyperedges {
            alters.extend_from_slice(self.hyperedge_by_id(id).members());
        }
        if hyperedges.len() > 1 {
            alters.sort_unstable();
            alters.dedup();
        }
        if let Ok(pos) = alters.binary_search(&node) {
            alters.remove(pos);
        }
        Ok(alters)
    }
}

impl LayerQuery for Layer {
    fn check_edge_exists(&self, a: NodeId, b: NodeId, traversal: Traversal) -> bool {
        match self {
            Layer::OneMode(l) => l.check_edge_exists(a, b, traversal),
            Layer::TwoMode(l) => l.check_edge_exists(a, b, traversal),
        }
    }

    fn get_edge_value(&self, a: NodeId, b: NodeId) -> f32 {
        match self {
            Layer::OneMode(l) => l.get_edge_value(a, b),
            Layer::TwoMode(l) => l.get_edge_value(a, b),
        }
    }

    fn get_node_alters(&self, node: NodeId, traversal: Traversal) -> Result<Vec<NodeId>> {
        match self {
            Layer::OneMode(l) => l.get_node_alters(node, traversal),
            Layer::TwoMode(l) => l.get_node_alters(node, traversal),
        }
    }
}

/// Sum of `k(k-1)/2` over hyperedge sizes `k`, with overflow reported.
pub fn projected_edge_count_from_sizes(sizes: impl IntoIterator<Item = u64>) -> Result<u64> {
    const WHAT: &str = "projected edge count";
    sizes.into_iter().try_fold(0u64, |acc, k| {
        if k < 2 {
            return Ok(acc);
        }
        // One of k, k-1 is even, so halve that one before multiplying.
        let (x, y) = if k % 2 == 0 { (k / 2, k - 1) } else { (k, (k - 1) / 2) };
        let pairs = x.checked_mul(y).ok_or(Error::ArithmeticOverflow(WHAT))?;
        acc.checked_add(pairs).ok_or(Error::ArithmeticOverflow(WHAT))
    })
}

/// Which layers a multilayer query runs over.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LayerSelection {
    #[default]
    All,
    Named(Vec<String>),
}

impl LayerSelection {
    pub fn named<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        LayerSelection::Named(names.into_iter().map(Into::into).collect())
    }

    pub(crate) fn resolve<'a>(&self, net: &'a Network) -> Result<Vec<&'a Layer>> {
        match self {
            LayerSelection::All => Ok(net.layers().collect()),
            LayerSelection::Named(names) => {
                let mut seen = std::collections::HashSet::new();
                let mut out = Vec::with_capacity(names.len());
                for name in names {
                    let layer = net.layer(name)?;
                    if seen.insert(name.as_str()) {
                        out.push(layer);
                    }
                }
                Ok(out)
            }
        }
    }
}

impl Network {
    pub(crate) fn ensure_nodes(&self, nodes: &[NodeId]) -> Result<()> {
        let ns = self.nodeset()?;
        let ns = read_nodeset(&ns);
        nodes.iter().try_for_each(|&n| ns.ensure_node(n))
    }

    pub fn check_edge_exists(&self, layer: &str, a: NodeId, b: NodeId, traversal: Traversal) -> Result<bool> {
        let layer = self.layer(layer)?;
        self.ensure_nodes(&[a, b])?;
        Ok(layer.check_edge_exists(a, b, traversal))
    }

    pub fn get_edge_value(&self, layer: &str, a: NodeId, b: NodeId) -> Result<f32> {
        let layer = self.layer(layer)?;
        self.ensure_nodes(&[a, b])?;
        Ok(layer.get_edge_value(a, b))
    }

    /// Union of the node's alters over the selected layers, ascending.
    pub fn get_node_alters(&self, node: NodeId, layers: &LayerSelection, traversal: Traversal) -> Result<Vec<NodeId>> {
        let layers = layers.resolve(self)?;
        self.ensure_nodes(&[node])?;
        let mut all = Vec::new();
        for layer in &layers {
            all.extend(layer.get_node_alters(node, traversal)?);
        }
        if layers.len() > 1 {
            all.sort_unstable();
            all.dedup();
        }
        Ok(all)
    }

    pub fn projected_edge_count(&self, layer: &str) -> Result<u64> {
        self.two_mode(layer)?.projected_edge_count()
    }
}
