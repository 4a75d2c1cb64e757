use std::collections::{BTreeMap, HashMap, VecDeque};

use super::{LayerQuery, LayerSelection};
use crate::error::{Error, Result};
use crate::model::{read_nodeset, AttributeKind, AttributeValue, Layer, Network, NodeId, Nodeset, Traversal};

/// Degree of a node in one layer. On two-mode layers `projected` selects the
/// number of distinct co-members; otherwise the number of memberships.
pub fn degree(net: &Network, layer: &str, node: NodeId, traversal: Traversal, projected: bool) -> Result<u64> {
    let l = net.layer(layer)?;
    net.ensure_nodes(&[node])?;
    Ok(match l {
        Layer::OneMode(l) if !l.is_directed() || traversal == Traversal::Out => l.out_degree(node) as u64,
        Layer::TwoMode(l) if !projected => l.memberships_of(node).len() as u64,
        _ => l.get_node_alters(node, traversal)?.len() as u64,
    })
}

/// Share of possible ties present. Two-mode layers use memberships over
/// `nodes * hyperedges`. Empty denominators give 0.
pub fn density(net: &Network, layer: &str) -> Result<f64> {
    let l = net.layer(layer)?;
    let n = read_nodeset(&net.nodeset()?).len() as f64;
    let (present, possible) = match l {
        Layer::OneMode(l) => {
            let spec = l.spec();
            let possible = match (spec.directed, spec.allow_self_ties) {
                (false, false) => n * (n - 1.0) / 2.0,
                (false, true) => n * (n + 1.0) / 2.0,
                (true, false) => n * (n - 1.0),
                (true, true) => n * n,
            };
            (l.edge_count() as f64, possible)
        }
        Layer::TwoMode(l) => (l.membership_count() as f64, n * l.hyperedge_count() as f64),
    };
    Ok(if possible > 0.0 { present / possible } else { 0.0 })
}

/// Weak components over a set of layers, labelled by their smallest node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    labels: HashMap<NodeId, NodeId>,
}

impl Components {
    pub fn label(&self, node: NodeId) -> Option<NodeId> {
        self.labels.get(&node).copied()
    }

    pub fn labels(&self) -> &HashMap<NodeId, NodeId> {
        &self.labels
    }

    pub fn count(&self) -> usize {
        self.labels.iter().filter(|(n, l)| n == l).count()
    }

    /// Component sizes keyed by label.
    pub fn sizes(&self) -> BTreeMap<NodeId, u64> {
        let mut sizes = BTreeMap::new();
        for &label in self.labels.values() {
            *sizes.entry(label).or_insert(0) += 1;
        }
        sizes
    }
}

struct DisjointSets {
    parent: Vec<u32>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    // The smaller index becomes the root, so roots are component minima.
    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Directed edges are treated as undirected; two-mode layers join all
/// members of each hyperedge.
pub fn connected_components(net: &Network, layers: &LayerSelection) -> Result<Components> {
    let layers = layers.resolve(net)?;
    let ids = read_nodeset(&net.nodeset()?).sorted_ids();
    let index = |n: NodeId| ids.binary_search(&n).expect("endpoint in nodeset") as u32;
    let mut sets = DisjointSets::new(ids.len());
    for layer in layers {
        match layer {
            Layer::OneMode(l) => l.for_each_edge(|a, b, _| sets.union(index(a), index(b))),
            Layer::TwoMode(l) => {
                for he in l.hyperedges() {
                    if let Some((&first, rest)) = he.members().split_first() {
                        let root = index(first);
                        for &m in rest {
                            sets.union(root, index(m));
                        }
                    }
                }
            }
        }
    }
    let labels = ids
        .iter()
        .enumerate()
        .map(|(i, &id)| (id, ids[sets.find(i as u32) as usize]))
        .collect();
    Ok(Components { labels })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathResult {
    pub length: usize,
    pub nodes: Vec<NodeId>,
}

/// Unweighted breadth-first search over the union of the selected layers.
/// Directed layers are followed outwards only; a shared hyperedge counts as one
/// hop and each hyperedge is expanded at most once. Returns `None` when the
/// target is unreachable.
pub fn shortest_path(net: &Network, source: NodeId, target: NodeId, layers: &LayerSelection) -> Result<Option<PathResult>> {
    let layers = layers.resolve(net)?;
    net.ensure_nodes(&[source, target])?;
    if source == target {
        return Ok(Some(PathResult {
            length: 0,
            nodes: vec![source],
        }));
    }

    let mut expanded: Vec<Vec<bool>> = layers
        .iter()
        .map(|l| match l {
            Layer::TwoMode(l) => vec![false; l.hyperedge_count()],
            Layer::OneMode(_) => Vec::new(),
        })
        .collect();
    let mut parent: HashMap<NodeId, NodeId> = HashMap::from([(source, source)]);
    let mut queue = VecDeque::from([source]);
    let mut next = Vec::new();

    while let Some(u) = queue.pop_front() {
        next.clear();
        for (layer, expanded) in layers.iter().zip(expanded.iter_mut()) {
            match layer {
                Layer::OneMode(l) => next.extend(l.out_edges(u).into_iter().map(|e| e.0)),
                Layer::TwoMode(l) => {
                    for &id in l.memberships_of(u) {
                        if !std::mem::replace(&mut expanded[id as usize], true) {
                            next.extend_from_slice(l.hyperedge_by_id(id).members());
                        }
                    }
                }
            }
        }
        next.sort_unstable();
        next.dedup();
        for &v in &next {
            if parent.contains_key(&v) {
                continue;
            }
            parent.insert(v, u);
            if v == target {
                let mut nodes = vec![v];
                let mut cur = v;
                while cur != source {
                    cur = parent[&cur];
                    nodes.push(cur);
                }
                nodes.reverse();
                return Ok(Some(PathResult {
                    length: nodes.len() - 1,
                    nodes,
                }));
            }
            queue.push_back(v);
        }
    }
    Ok(None)
}

/// Summary of one attribute over the nodes that have it.
#[derive(Debug, Clone, PartialEq)]
pub enum AttributeSummary {
    Numeric {
        kind: AttributeKind,
        count: u64,
        min: Option<f64>,
        max: Option<f64>,
        mean: Option<f64>,
    },
    Bool {
        count: u64,
        true_count: u64,
    },
    Char {
        count: u64,
        frequencies: BTreeMap<char, u64>,
    },
}

impl AttributeSummary {
    pub fn count(&self) -> u64 {
        match self {
            AttributeSummary::Numeric { count, .. }
            | AttributeSummary::Bool { count, .. }
            | AttributeSummary::Char { count, .. } => *count,
        }
    }
}

pub fn summarize_attribute(ns: &Nodeset, name: &str) -> Result<AttributeSummary> {
    let kind = ns
        .attribute_kind(name)
        .ok_or_else(|| Error::UnknownAttribute(name.to_string()))?;
    let values = ns.attribute_values(name).map(|(_, v)| v);
    Ok(match kind {
        AttributeKind::Int | AttributeKind::Float => {
            let (mut count, mut sum) = (0u64, 0f64);
            let (mut min, mut max): (Option<f64>, Option<f64>) = (None, None);
            for v in values {
                let x = match v {
                    AttributeValue::Int(i) => f64::from(i),
                    AttributeValue::Float(f) => f64::from(f),
                    _ => unreachable!("schema enforces one kind per attribute"),
                };
                count += 1;
                sum += x;
                min = Some(min.map_or(x, |m| m.min(x)));
                max = Some(max.map_or(x, |m| m.max(x)));
            }
            AttributeSummary::Numeric {
                kind,
                count,
                min,
                max,
                mean: (count > 0).then(|| sum / count as f64),
            }
        }
        AttributeKind::Bool => {
            let (mut count, mut true_count) = (0, 0);
            for v in values {
                count += 1;
                if v == AttributeValue::Bool(true) {
                    true_count += 1;
                }
            }
            AttributeSummary::Bool { count, true_count }
        }
        AttributeKind::Char => {
            let mut frequencies = BTreeMap::new();
            let mut count = 0;
            for v in values {
                if let AttributeValue::Char(c) = v {
                    count += 1;
                    *frequencies.entry(c).or_insert(0) += 1;
                }
            }
            AttributeSummary::Char { count, frequencies }
        }
    })
}
