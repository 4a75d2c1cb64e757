//! In-place transformations of one-mode layers.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::{LayerOneMode, Network, NodeId};

/// How the two directions of a pair are combined when symmetrizing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetrizeMethod {
    Max,
    Min,
    Sum,
    /// Edge present if either direction is; value 1.0.
    Or,
}

impl SymmetrizeMethod {
    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" => Some(Self::Max),
            "min" => Some(Self::Min),
            "sum" => Some(Self::Sum),
            "or" => Some(Self::Or),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Max => "max",
            Self::Min => "min",
            Self::Sum => "sum",
            Self::Or => "or",
        }
    }

    /// Combines `a -> b` and `b -> a`, absent directions counting as 0.
    /// A zero result means no edge.
    fn combine(&self, forward: f32, backward: f32) -> f32 {
        match self {
            Self::Max => forward.max(backward),
            Self::Min => forward.min(backward),
            Self::Sum => forward + backward,
            Self::Or => {
                if forward != 0.0 || backward != 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Makes a directed layer symmetric. Already symmetric layers are left alone.
pub fn symmetrize(net: &mut Network, layer: &str, method: SymmetrizeMethod) -> Result<()> {
    let l = net.one_mode_mut(layer)?;
    if !l.is_directed() {
        return Ok(());
    }
    if !l.is_valued() && method != SymmetrizeMethod::Or {
        return Err(Error::UnsupportedMethod {
            method: method.as_str(),
            layer_kind: "binary",
        });
    }
    let mut pairs: BTreeMap<(NodeId, NodeId), (f32, f32)> = BTreeMap::new();
    l.for_each_edge(|a, b, v| {
        let entry = pairs.entry((a.min(b), a.max(b))).or_insert((0.0, 0.0));
        if a <= b {
            entry.0 = v;
        } else {
            entry.1 = v;
        }
    });
    let mut spec = l.spec().clone();
    spec.directed = false;
    spec.store_inbound = true;
    let edges = pairs.into_iter().filter_map(|((a, b), (fwd, bwd))| {
        // A self-loop is a single tie with nothing to combine it with.
        let v = match (a == b, method) {
            (true, SymmetrizeMethod::Or) => 1.0,
            (true, _) => fwd,
            (false, _) => method.combine(fwd, bwd),
        };
        (v != 0.0).then_some((a, b, v))
    });
    l.rebuild(spec, edges);
    Ok(())
}

fn retain_edges(l: &mut LayerOneMode, keep: impl Fn(f32) -> bool) {
    let spec = l.spec().clone();
    let edges: Vec<_> = l.edges().into_iter().filter(|e| keep(e.2)).collect();
    l.rebuild(spec, edges);
}

/// Keeps edges with value `>= threshold` (or `< threshold` when
/// `keep_at_or_above` is false) and turns the layer binary. Binary layers are
/// treated as having value 1.0 on every edge.
pub fn dichotomize(net: &mut Network, layer: &str, threshold: f32, keep_at_or_above: bool) -> Result<()> {
    let l = net.one_mode_mut(layer)?;
    retain_edges(l, |v| (v >= threshold) == keep_at_or_above);
    l.make_binary();
    Ok(())
}

/// Removes edges whose value falls outside `[min, max]`; a missing bound is
/// unbounded. Binary layers count every edge as 1.0.
pub fn filter_edges(net: &mut Network, layer: &str, min: Option<f32>, max: Option<f32>) -> Result<()> {
    let l = net.one_mode_mut(layer)?;
    retain_edges(l, |v| min.is_none_or(|lo| v >= lo) && max.is_none_or(|hi| v <= hi));
    Ok(())
}
