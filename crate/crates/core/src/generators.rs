//! Random graph generators that write straight into an empty layer.
//!
//! Nodes are addressed by rank: the i-th smallest node ID of the network's
//! nodeset plays the role of node i. Every generator is deterministic for a
//! given seed.

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::model::{read_nodeset, LayerOneMode, LayerTwoMode, Network, NodeId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneratorParams {
    /// G(n, p): every pair independently with probability `p`.
    ErdosRenyi { p: f64 },
    /// Ring lattice of degree `k`, each edge rewired with probability `beta`.
    WattsStrogatz { k: u64, beta: f64 },
    /// Preferential attachment, `m` edges per arriving node.
    BarabasiAlbert { m: u64 },
    /// `h` hyperedges; each node joins Poisson(`a`) of them.
    TwoMode { h: u64, a: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GenerationReport {
    /// Edges (one-mode) or memberships (two-mode) created.
    pub ties: u64,
    /// Hyperedges created (two-mode only).
    pub hyperedges: u64,
    /// Lattice edges that were rewired (Watts-Strogatz only).
    pub rewired: u64,
}

pub fn generate(net: &mut Network, layer: &str, params: GeneratorParams, seed: Seed) -> Result<GenerationReport> {
    match params {
        GeneratorParams::ErdosRenyi { p } => generate_er(net, layer, p, seed),
        GeneratorParams::WattsStrogatz { k, beta } => generate_ws(net, layer, k, beta, seed),
        GeneratorParams::BarabasiAlbert { m } => generate_ba(net, layer, m, seed),
        GeneratorParams::TwoMode { h, a } => generate_2mode(net, layer, h, a, seed),
    }
}

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in [0, 1], got {p}")))
    }
}

/// Sorted node IDs plus the empty symmetric layer to fill.
fn one_mode_target<'a>(net: &'a mut Network, layer: &str) -> Result<(Vec<NodeId>, &'a mut LayerOneMode)> {
    let ids = read_nodeset(&net.nodeset()?).sorted_ids();
    let l = net.one_mode_mut(layer)?;
    if l.is_directed() {
        return Err(Error::InvalidParameter(format!(
            "generators need a symmetric layer; '{layer}' is directed"
        )));
    }
    if !l.is_empty() {
        return Err(Error::NonEmptyLayer(layer.to_string()));
    }
    Ok((ids, l))
}

/// Emits the pairs `(v, w)`, `w < v < n`, of G(n, p) in lexicographic order by
/// jumping over absent pairs with geometrically distributed skips.
pub(crate) fn er_pairs(n: u64, p: f64, rng: &mut impl Rng, mut emit: impl FnMut(u64, u64)) {
    if n < 2 || p <= 0.0 {
        return;
    }
    if p >= 1.0 {
        for v in 1..n {
            for w in 0..v {
                emit(v, w);
            }
        }
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut v: u64 = 1;
    let mut w: u64 = 0;
    let mut first = true;
    while v < n {
        // u in (0, 1] keeps the logarithm finite
        let u = 1.0 - rng.random::<f64>();
        let skip = (u.ln() / log_q).floor() as u64;
        w = if first { skip } else { w.saturating_add(1).saturating_add(skip) };
        first = false;
        while w >= v && v < n {
            w -= v;
            v += 1;
        }
        if v < n {
            emit(v, w);
        }
    }
}

pub fn generate_er(net: &mut Network, layer: &str, p: f64, seed: Seed) -> Result<GenerationReport> {
    check_probability("p", p)?;
    let (ids, l) = one_mode_target(net, layer)?;
    let mut rng = seed.rng();
    er_pairs(ids.len() as u64, p, &mut rng, |v, w| {
        l.insert_edge(ids[w as usize], ids[v as usize], 1.0);
    });
    Ok(GenerationReport {
        ties: l.edge_count(),
        ..Default::default()
    })
}

pub fn generate_ws(net: &mut Network, layer: &str, k: u64, beta: f64, seed: Seed) -> Result<GenerationReport> {
    check_probability("beta", beta)?;
    let (ids, l) = one_mode_target(net, layer)?;
    let n = ids.len() as u64;
    if k == 0 || !k.is_multiple_of(2) || k >= n {
        return Err(Error::InvalidK { k, n });
    }
    let half = k / 2;
    for i in 0..n {
        for j in 1..=half {
            l.insert_edge(ids[i as usize], ids[((i + j) % n) as usize], 1.0);
        }
    }

    let mut rng = seed.rng();
    let mut rewired = 0;
    for i in 0..n {
        for j in 1..=half {
            if rng.random::<f64>() >= beta {
                continue;
            }
            let other = (i + j) % n;
            let (keep, old) = if i < other { (i, other) } else { (other, i) };
            let keep_id = ids[keep as usize];
            for _ in 0..n {
                let w = rng.random_range(0..n);
                if w == keep || l.edge_value(keep_id, ids[w as usize]).is_some() {
                    continue;
                }
                l.delete_edge(keep_id, ids[old as usize]);
                l.insert_edge(keep_id, ids[w as usize], 1.0);
                rewired += 1;
                break;
            }
        }
    }
    Ok(GenerationReport {
        ties: l.edge_count(),
        rewired,
        ..Default::default()
    })
}

pub fn generate_ba(net: &mut Network, layer: &str, m: u64, seed: Seed) -> Result<GenerationReport> {
    let (ids, l) = one_mode_target(net, layer)?;
    let n = ids.len() as u64;
    if m == 0 || m >= n {
        return Err(Error::InvalidM { m, n });
    }
    let mut rng = seed.rng();
    // Every edge appends both endpoints, so a uniform pick from this list is a
    // degree-proportional pick of a node.
    let mut endpoints: Vec<u32> = Vec::with_capacity((2 * m * (n - m)) as usize);
    for seed_node in 0..m {
        l.insert_edge(ids[m as usize], ids[seed_node as usize], 1.0);
        endpoints.extend([m as u32, seed_node as u32]);
    }
    let mut targets: Vec<u32> = Vec::with_capacity(m as usize);
    for t in (m + 1)..n {
        targets.clear();
        while (targets.len() as u64) < m {
            let pick = endpoints[rng.random_range(0..endpoints.len())];
            if !targets.contains(&pick) {
                targets.push(pick);
            }
        }
        for &target in &targets {
            l.insert_edge(ids[t as usize], ids[target as usize], 1.0);
            endpoints.extend([t as u32, target]);
        }
    }
    Ok(GenerationReport {
        ties: l.edge_count(),
        ..Default::default()
    })
}

pub fn generate_2mode(net: &mut Network, layer: &str, h: u64, a: f64, seed: Seed) -> Result<GenerationReport> {
    let ids = read_nodeset(&net.nodeset()?).sorted_ids();
    let l: &mut LayerTwoMode = net.two_mode_mut(layer)?;
    if !l.is_empty() {
        return Err(Error::NonEmptyLayer(layer.to_string()));
    }
    if h == 0 || h > u64::from(u32::MAX) {
        return Err(Error::InvalidParameter(format!("h must be a positive 32-bit count, got {h}")));
    }
    let poisson = Poisson::new(a)
        .map_err(|_| Error::InvalidParameter(format!("a must be positive and finite, got {a}")))?;
    for i in 0..h {
        l.create_hyperedge(&i.to_string())?;
    }
    let mut rng = seed.rng();
    let mut chosen: Vec<u32> = Vec::new();
    for &node in &ids {
        let draw: f64 = poisson.sample(&mut rng);
        let c = (draw as u64).min(h);
        if c == 0 {
            continue;
        }
        chosen.clear();
        chosen.extend(index::sample(&mut rng, h as usize, c as usize).into_iter().map(|x| x as u32));
        chosen.sort_unstable();
        for &he in &chosen {
            l.join(he, node);
        }
    }
    Ok(GenerationReport {
        ties: l.membership_count(),
        hyperedges: h,
        ..Default::default()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{LayerSpec, Nodeset, SharedNodeset};
    use crate::query::LayerQuery;

    fn net_with(n: u64, spec: LayerSpec) -> (SharedNodeset, Network) {
        let ns = Nodeset::with_count(n).unwrap().into_shared();
        let mut net = Network::new(&ns);
        net.add_layer(spec).unwrap();
        (ns, net)
    }

    #[test]
    fn er_extremes() {
        let (_ns, mut net) = net_with(5, LayerSpec::one_mode("R"));
        assert_eq!(generate_er(&mut net, "R", 0.0, Seed(1)).unwrap().ties, 0);
        let (_ns, mut net) = net_with(5, LayerSpec::one_mode("R"));
        assert_eq!(generate_er(&mut net, "R", 1.0, Seed(1)).unwrap().ties, 10);
        net.validate().unwrap();
    }

    #[test]
    fn er_pairs_are_lexicographic_and_lower_triangular() {
        let mut rng = Seed(3).rng();
        let mut pairs = Vec::new();
        er_pairs(200, 0.05, &mut rng, |v, w| pairs.push((v, w)));
        assert!(pairs.iter().all(|&(v, w)| w < v && v < 200));
        assert!(pairs.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn er_density_near_p() {
        let (_ns, mut net) = net_with(10_000, LayerSpec::one_mode("R"));
        let report = generate_er(&mut net, "R", 0.001, Seed(7)).unwrap();
        // pairs = 49,995,000; mean 49,995; sigma = sqrt(pairs * p * (1 - p))
        let pairs = 10_000f64 * 9_999.0 / 2.0;
        let sigma = (pairs * 0.001 * 0.999).sqrt();
        assert!((report.ties as f64 - 49_995.0).abs() < 5.0 * sigma, "{}", report.ties);
        let d = crate::query::density(&net, "R").unwrap();
        assert!((d - 0.001).abs() < 5.0 * sigma / pairs);
    }

    #[test]
    fn ws_without_rewiring_is_ring_lattice() {
        let (_ns, mut net) = net_with(12, LayerSpec::one_mode("N"));
        let r = generate_ws(&mut net, "N", 4, 0.0, Seed(1)).unwrap();
        assert_eq!(r.ties, 24);
        assert_eq!(r.rewired, 0);
        let l = net.layer("N").unwrap();
        for i in 0..12u32 {
            let expected: std::collections::BTreeSet<u32> =
                [1u32, 2, 10, 11].iter().map(|d| (i + d) % 12).collect();
            let alters: std::collections::BTreeSet<u32> =
                l.get_node_alters(i, Default::default()).unwrap().into_iter().collect();
            assert_eq!(alters, expected, "node {i}");
        }
    }

    #[test]
    fn ws_edge_count_and_rewiring_rate() {
        let (_ns, mut net) = net_with(1_000, LayerSpec::one_mode("N"));
        let r = generate_ws(&mut net, "N", 10, 0.1, Seed(11)).unwrap();
        assert_eq!(r.ties, 5_000);
        assert_eq!(net.one_mode("N").unwrap().edge_count(), 5_000);
        let sigma = (5_000f64 * 0.1 * 0.9).sqrt();
        assert!((r.rewired as f64 - 500.0).abs() < 5.0 * sigma, "{}", r.rewired);
        net.validate().unwrap();
    }

    #[test]
    fn ws_rejects_bad_k() {
        for k in [0, 3, 10, 12] {
            let (_ns, mut net) = net_with(10, LayerSpec::one_mode("N"));
            assert!(matches!(generate_ws(&mut net, "N", k, 0.1, Seed(1)), Err(Error::InvalidK { .. })));
        }
    }

    #[test]
    fn ws_full_rewiring_keeps_count() {
        let (_ns, mut net) = net_with(7, LayerSpec::one_mode("N"));
        let r = generate_ws(&mut net, "N", 6, 1.0, Seed(5)).unwrap();
        // complete graph: nothing can be rewired
        assert_eq!(r.ties, 21);
        assert_eq!(r.rewired, 0);
    }

    #[test]
    fn ba_star() {
        let (_ns, mut net) = net_with(4, LayerSpec::one_mode("C"));
        let r = generate_ba(&mut net, "C", 3, Seed(1)).unwrap();
        assert_eq!(r.ties, 3);
        assert_eq!(net.layer("C").unwrap().get_node_alters(3, Default::default()).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn ba_edge_count() {
        let (_ns, mut net) = net_with(500, LayerSpec::one_mode("C"));
        assert_eq!(generate_ba(&mut net, "C", 4, Seed(9)).unwrap().ties, 4 * 496);
        net.validate().unwrap();
    }

    #[test]
    fn ba_rejects_bad_m() {
        for m in [0, 10, 11] {
            let (_ns, mut net) = net_with(10, LayerSpec::one_mode("C"));
            assert!(matches!(generate_ba(&mut net, "C", m, Seed(1)), Err(Error::InvalidM { .. })));
        }
    }

    #[test]
    fn two_mode_tiny_mean_leaves_nodes_unaffiliated() {
        let (_ns, mut net) = net_with(1_000, LayerSpec::two_mode("W"));
        let r = generate_2mode(&mut net, "W", 10, 1e-9, Seed(1)).unwrap();
        assert_eq!(r.hyperedges, 10);
        assert!(r.ties <= 1);
        let l = net.two_mode("W").unwrap();
        assert_eq!(l.hyperedge("9").map(|h| h.name()), Some("9"));
    }

    #[test]
    fn two_mode_caps_draws_at_h() {
        let (_ns, mut net) = net_with(50, LayerSpec::two_mode("W"));
        let r = generate_2mode(&mut net, "W", 2, 40.0, Seed(1)).unwrap();
        assert_eq!(r.ties, 100);
        net.validate().unwrap();
    }

    #[test]
    fn generators_require_empty_layers_of_the_right_kind() {
        let (_ns, mut net) = net_with(10, LayerSpec::one_mode("R"));
        net.add_layer(LayerSpec::two_mode("W")).unwrap();
        net.add_layer(LayerSpec::one_mode("D").directed(true)).unwrap();
        generate_er(&mut net, "R", 0.5, Seed(1)).unwrap();
        assert!(matches!(generate_er(&mut net, "R", 0.5, Seed(1)), Err(Error::NonEmptyLayer(_))));
        assert!(matches!(generate_er(&mut net, "W", 0.5, Seed(1)), Err(Error::WrongLayerMode { .. })));
        assert!(matches!(generate_2mode(&mut net, "R", 2, 1.0, Seed(1)), Err(Error::WrongLayerMode { .. })));
        assert!(matches!(generate_er(&mut net, "D", 0.5, Seed(1)), Err(Error::InvalidParameter(_))));
        assert!(matches!(generate_er(&mut net, "R", 1.5, Seed(1)), Err(Error::InvalidParameter(_))));
        generate_2mode(&mut net, "W", 2, 1.0, Seed(1)).unwrap();
        assert!(matches!(generate_2mode(&mut net, "W", 2, 1.0, Seed(1)), Err(Error::NonEmptyLayer(_))));
    }

    #[test]
    fn non_contiguous_ids_are_used_by_rank() {
        let ns = Nodeset::from_ids([100, 7, 55, 3000]).unwrap().into_shared();
        let mut net = Network::new(&ns);
        net.add_layer(LayerSpec::one_mode("R")).unwrap();
        generate_er(&mut net, "R", 1.0, Seed(1)).unwrap();
        assert_eq!(net.one_mode("R").unwrap().edge_count(), 6);
        net.validate().unwrap();
    }
}
