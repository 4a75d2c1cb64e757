//! Random instance builders and brute-force oracles shared by the integration
//! tests. The oracles never call the query code under test.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use weft_core::model::{AttributeValue, LayerSpec, Network, NodeId, Nodeset, SharedNodeset};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Distinct, non-contiguous node IDs.
pub fn scattered_ids(rng: &mut impl Rng, n: usize) -> Vec<NodeId> {
    let mut ids = BTreeSet::new();
    while ids.len() < n {
        ids.insert(rng.random_range(0..(n as u32 * 7 + 10)));
    }
    let mut ids: Vec<NodeId> = ids.into_iter().collect();
    ids.shuffle(rng);
    ids
}

/// Hyperedge name -> members, built independently of the engine.
pub type Affiliations = BTreeMap<String, BTreeSet<NodeId>>;

pub fn random_affiliations(rng: &mut impl Rng, ids: &[NodeId], h: usize, a: f64) -> Affiliations {
    let mut aff: Affiliations = (0..h).map(|i| (format!("g{i}"), BTreeSet::new())).collect();
    let poisson = Poisson::new(a.max(1e-9)).unwrap();
    for &id in ids {
        let k = (poisson.sample(rng) as usize).min(h);
        for i in rand::seq::index::sample(rng, h, k) {
            aff.get_mut(&format!("g{i}")).unwrap().insert(id);
        }
    }
    aff
}

pub fn load_affiliations(net: &mut Network, layer: &str, aff: &Affiliations) {
    for (name, members) in aff {
        let members: Vec<NodeId> = members.iter().copied().collect();
        net.add_hyperedge(layer, name, &members).unwrap();
    }
}

/// The full one-mode projection: unordered pair -> number of shared hyperedges.
pub fn materialize(aff: &Affiliations) -> HashMap<(NodeId, NodeId), u32> {
    let mut pairs = HashMap::new();
    for members in aff.values() {
        let m: Vec<NodeId> = members.iter().copied().collect();
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                *pairs.entry((m[i], m[j])).or_insert(0) += 1;
            }
        }
    }
    pairs
}

pub fn pair(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    (a.min(b), a.max(b))
}

/// A plain directed-or-not edge list kept next to the engine's copy.
#[derive(Debug, Clone)]
pub struct EdgeOracle {
    pub directed: bool,
    pub edges: BTreeMap<(NodeId, NodeId), f32>,
}

impl EdgeOracle {
    pub fn key(&self, a: NodeId, b: NodeId) -> (NodeId, NodeId) {
        if self.directed {
            (a, b)
        } else {
            pair(a, b)
        }
    }
}

/// Adds a random one-mode layer to `net` and returns its oracle copy.
pub fn random_one_mode(
    rng: &mut impl Rng,
    net: &mut Network,
    name: &str,
    ids: &[NodeId],
    directed: bool,
    valued: bool,
    edges: usize,
) -> EdgeOracle {
    let self_ties = rng.random_bool(0.3);
    let spec = LayerSpec::one_mode(name)
        .directed(directed)
        .valued(valued)
        .self_ties(self_ties);
    net.add_layer(spec).unwrap();
    let mut oracle = EdgeOracle {
        directed,
        edges: BTreeMap::new(),
    };
    for _ in 0..edges {
        let a = ids[rng.random_range(0..ids.len())];
        let b = ids[rng.random_range(0..ids.len())];
        if a == b && !self_ties {
            continue;
        }
        let v = if valued {
            (rng.random_range(-4i32..=12) as f32) * 0.5
        } else {
            1.0
        };
        if valued && v == 0.0 {
            continue;
        }
        net.add_edge(name, a, b, v).unwrap();
        let key = oracle.key(a, b);
        oracle.edges.insert(key, v);
    }
    oracle
}

/// Directed adjacency of the union of layers: one-mode edges as stored
/// (both directions when symmetric), two-mode layers fully projected.
pub fn union_adjacency(one: &[&EdgeOracle], two: &[&Affiliations]) -> BTreeMap<NodeId, BTreeSet<NodeId>> {
    let mut adj: BTreeMap<NodeId, BTreeSet<NodeId>> = BTreeMap::new();
    for o in one {
        for &(a, b) in o.edges.keys() {
            adj.entry(a).or_default().insert(b);
            if !o.directed {
                adj.entry(b).or_default().insert(a);
            }
        }
    }
    for aff in two {
        for &(a, b) in materialize(aff).keys() {
            adj.entry(a).or_default().insert(b);
            adj.entry(b).or_default().insert(a);
        }
    }
    adj
}

pub fn bfs_distance(adj: &BTreeMap<NodeId, BTreeSet<NodeId>>, s: NodeId, t: NodeId) -> Option<usize> {
    let mut dist = HashMap::from([(s, 0usize)]);
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        if u == t {
            return Some(dist[&u]);
        }
        for &v in adj.get(&u).into_iter().flatten() {
            if !dist.contains_key(&v) {
                dist.insert(v, dist[&u] + 1);
                queue.push_back(v);
            }
        }
    }
    None
}

/// Weak component labels (smallest member ID) via repeated label propagation.
pub fn component_labels(ids: &[NodeId], adj: &BTreeMap<NodeId, BTreeSet<NodeId>>) -> BTreeMap<NodeId, NodeId> {
    let mut label: BTreeMap<NodeId, NodeId> = ids.iter().map(|&i| (i, i)).collect();
    loop {
        let mut changed = false;
        for (&a, nbrs) in adj {
            for &b in nbrs {
                let m = label[&a].min(label[&b]);
                for x in [a, b] {
                    if label[&x] != m {
                        label.insert(x, m);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return label;
        }
    }
}

/// A nodeset with random attributes of every kind, plus its shared handle.
pub fn random_nodeset(rng: &mut impl Rng, n: usize) -> (Vec<NodeId>, SharedNodeset) {
    let ids = scattered_ids(rng, n);
    let mut ns = Nodeset::from_ids(ids.iter().copied()).unwrap();
    let chars = ['a', 'Z', 'é', '\t', '\\', '\n', ' ', '中'];
    for &id in &ids {
        if rng.random_bool(0.3) {
            ns.set_attribute(id, "age", AttributeValue::Int(rng.random_range(-100..100))).unwrap();
        }
        if rng.random_bool(0.3) {
            ns.set_attribute(id, "score", AttributeValue::Float(rng.random::<f32>() * 1e3 - 5e2))
                .unwrap();
        }
        if rng.random_bool(0.2) {
            ns.set_attribute(id, "active", AttributeValue::Bool(rng.random())).unwrap();
        }
        if rng.random_bool(0.2) {
            ns.set_attribute(id, "grade", AttributeValue::Char(chars[rng.random_range(0..chars.len())]))
                .unwrap();
        }
    }
    (ids, ns.into_shared())
}

/// A network mixing every layer flavour.
pub fn random_network(rng: &mut impl Rng, ids: &[NodeId], ns: &SharedNodeset) -> Network {
    let mut net = Network::new(ns);
    let layers = rng.random_range(0..5);
    for i in 0..layers {
        let name = format!("layer {i}");
        match rng.random_range(0..4) {
            0 => {
                net.add_layer(LayerSpec::two_mode(name.clone())).unwrap();
                let h = rng.random_range(0..8);
                let aff = random_affiliations(rng, ids, h, 1.5);
                load_affiliations(&mut net, &name, &aff);
            }
            kind => {
                let directed = kind != 1;
                let valued = rng.random_bool(0.5);
                let edges = rng.random_range(0..ids.len() * 2 + 1);
                random_one_mode(rng, &mut net, &name, ids, directed, valued, edges);
                if directed && rng.random_bool(0.3) {
                    // Exercise the inbound flag in files.
                    let l = net.remove_layer(&name).unwrap();
                    let edges = l.as_one_mode().unwrap().edges();
                    let spec = l.spec().clone().store_inbound(false);
                    net.add_layer(spec).unwrap();
                    for (a, b, v) in edges {
                        net.add_edge(&name, a, b, v).unwrap();
                    }
                }
            }
        }
    }
    net
}
