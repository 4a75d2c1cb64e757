use std::collections::HashMap;

use super::{LayerSpec, NodeId};
use crate::error::{Error, Result};

/// Position of a hyperedge inside its layer.
pub type HyperedgeId = u32;

/// A named affiliation and its members (kept sorted).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperedge {
    name: String,
    members: Vec<NodeId>,
}

impl Hyperedge {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn members(&self) -> &[NodeId] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A two-mode layer: named hyperedges plus the reverse index from each node to
/// the hyperedges it belongs to. Only memberships are stored, never the
/// pairwise projection.
#[derive(Debug, Clone)]
pub struct LayerTwoMode {
    spec: LayerSpec,
    hyperedges: Vec<Hyperedge>,
    by_name: HashMap<String, HyperedgeId>,
    pub(crate) memberships: HashMap<NodeId, Vec<HyperedgeId>>,
    membership_count: u64,
}

impl LayerTwoMode {
    pub(crate) fn new(spec: LayerSpec) -> Self {
        Self {
            spec: spec.normalized(),
            hyperedges: Vec::new(),
            by_name: HashMap::new(),
            memberships: HashMap::new(),
            membership_count: 0,
        }
    }

    pub fn spec(&self) -> &LayerSpec {
        &self.spec
    }

    pub fn name(&self) -> &str {
        &self.spec.name
    }

    pub fn hyperedge_count(&self) -> usize {
        self.hyperedges.len()
    }

    /// Total node-hyperedge ties; this is everything the layer stores.
    pub fn membership_count(&self) -> u64 {
        self.membership_count
    }

    pub fn is_empty(&self) -> bool {
        self.hyperedges.is_empty()
    }

    pub fn hyperedges(&self) -> &[Hyperedge] {
        &self.hyperedges
    }

    pub fn hyperedge(&self, name: &str) -> Option<&Hyperedge> {
        self.by_name.get(name).map(|&id| &self.hyperedges[id as usize])
    }

    pub(crate) fn hyperedge_by_id(&self, id: HyperedgeId) -> &Hyperedge {
        &self.hyperedges[id as usize]
    }

    /// Hyperedges the node belongs to, in creation order.
    pub fn memberships_of(&self, node: NodeId) -> &[HyperedgeId] {
        self.memberships.get(&node).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn membership_names(&self, node: NodeId) -> Vec<&str> {
        self.memberships_of(node)
            .iter()
            .map(|&id| self.hyperedges[id as usize].name.as_str())
            .collect()
    }

    /// Number of nodes with at least one membership.
    pub fn affiliated_node_count(&self) -> usize {
        self.memberships.len()
    }

    pub(crate) fn create_hyperedge(&mut self, name: &str) -> Result<HyperedgeId> {
        if self.by_name.contains_key(name) {
            return Err(Error::DuplicateHyperedge(name.to_string()));
        }
        validate_hyperedge_name(name)?;
        let id = HyperedgeId::try_from(self.hyperedges.len())
            .map_err(|_| Error::InvalidParameter("too many hyperedges in one layer".into()))?;
        self.hyperedges.push(Hyperedge {
            name: name.to_string(),
            members: Vec::new(),
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub(crate) fn hyperedge_id(&self, name: &str) -> Result<HyperedgeId> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownHyperedge(name.to_string()))
    }

    /// Adds a membership to both indexes. Returns false if it already existed.
    pub(crate) fn join(&mut self, id: HyperedgeId, node: NodeId) -> bool {
        let members = &mut self.hyperedges[id as usize].members;
        // Generators and loaders append in ascending order; take the fast path.
        match members.last() {
            Some(&last) if last < node => members.push(node),
            None => members.push(node),
            _ => match members.binary_search(&node) {
                Ok(_) => return false,
                Err(pos) => members.insert(pos, node),
            },
        }
        let list = self.memberships.entry(node).or_default();
        match list.last() {
            Some(&last) if last < id => list.push(id),
            None => list.push(id),
            _ => {
                let pos = list.binary_search(&id).unwrap_err();
                list.insert(pos, id);
            }
        }
        self.membership_count += 1;
        true
    }

    /// Removes a membership from both indexes. Returns false if it was absent.
    pub(crate) fn leave(&mut self, id: HyperedgeId, node: NodeId) -> bool {
        let members = &mut self.hyperedges[id as usize].members;
        let Ok(pos) = members.binary_search(&node) else {
            return false;
        };
        members.remove(pos);
        if let Some(list) = self.memberships.get_mut(&node) {
            if let Ok(pos) = list.binary_search(&id) {
                list.remove(pos);
            }
            if list.is_empty() {
                self.memberships.remove(&node);
            }
        }
        self.membership_count -= 1;
        true
    }

    pub(crate) fn clear(&mut self) {
        *self = LayerTwoMode::new(self.spec.clone());
    }

    /// Hyperedge ids ordered by name, the canonical order for output.
    pub fn ids_by_name(&self) -> Vec<HyperedgeId> {
        let mut ids: Vec<HyperedgeId> = (0..self.hyperedges.len() as HyperedgeId).collect();
        ids.sort_by(|&a, &b| self.hyperedges[a as usize].name.cmp(&self.hyperedges[b as usize].name));
        ids
    }

    /// Full-scan check that both indexes agree.
    pub fn validate(&self) -> Result<(), String> {
        let name = &self.spec.name;
        let mut total = 0u64;
        for (id, he) in self.hyperedges.iter().enumerate() {
            if !he.members.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!("{name}: hyperedge '{}' members unsorted or duplicated", he.name));
            }
            for &n in &he.members {
                total += 1;
                if self.memberships.get(&n).is_none_or(|l| l.binary_search(&(id as HyperedgeId)).is_err()) {
                    return Err(format!("{name}: node {n} in '{}' but not indexed", he.name));
                }
            }
        }
        let mut reverse = 0u64;
        for (&n, list) in &self.memberships {
            if list.is_empty() {
                return Err(format!("{name}: empty membership entry for node {n}"));
            }
            if !list.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!("{name}: memberships of {n} unsorted"));
            }
            for &id in list {
                reverse += 1;
                let he = self
                    .hyperedges
                    .get(id as usize)
                    .ok_or_else(|| format!("{name}: node {n} references missing hyperedge {id}"))?;
                if he.members.binary_search(&n).is_err() {
                    return Err(format!("{name}: node {n} indexed in '{}' but not a member", he.name));
                }
            }
        }
        if total != reverse || total != self.membership_count {
            return Err(format!(
                "{name}: {total} members, {reverse} index entries, count says {}",
                self.membership_count
            ));
        }
        for (hname, &id) in &self.by_name {
            if self.hyperedges.get(id as usize).is_none_or(|h| &h.name != hname) {
                return Err(format!("{name}: name index broken for '{hname}'"));
            }
        }
        Ok(())
    }
}

fn validate_hyperedge_name(name: &str) -> Result<()> {
    if name.is_empty() || name.starts_with('#') || name.contains(['\t', '\n', '\r']) || name.len() > u16::MAX as usize {
        return Err(Error::InvalidName(name.to_string()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn layer() -> LayerTwoMode {
        LayerTwoMode::new(LayerSpec::two_mode("W"))
    }

    #[test]
    fn dual_index_updated_on_join() {
        let mut l = layer();
        let w1 = l.create_hyperedge("W1").unwrap();
        for n in [1, 2, 3] {
            l.join(w1, n);
        }
        assert_eq!(l.membership_names(2), vec!["W1"]);
        assert_eq!(l.membership_count(), 3);
        l.validate().unwrap();
    }

    #[test]
    fn empty_hyperedge_creates_no_entries() {
        let mut l = layer();
        l.create_hyperedge("W2").unwrap();
        assert_eq!(l.hyperedge_count(), 1);
        assert_eq!(l.affiliated_node_count(), 0);
        l.validate().unwrap();
    }

    #[test]
    fn leaving_last_membership_drops_entry() {
        let mut l = layer();
        let a = l.create_hyperedge("A").unwrap();
        let b = l.create_hyperedge("B").unwrap();
        l.join(a, 5);
        l.join(b, 5);
        assert!(l.leave(a, 5));
        assert_eq!(l.memberships_of(5), &[b]);
        assert!(l.leave(b, 5));
        assert!(!l.memberships.contains_key(&5));
        assert!(!l.leave(b, 5));
        l.validate().unwrap();
    }

    #[test]
    fn out_of_order_joins_stay_sorted() {
        let mut l = layer();
        let a = l.create_hyperedge("A").unwrap();
        let b = l.create_hyperedge("B").unwrap();
        l.join(b, 9);
        l.join(a, 9);
        l.join(a, 3);
        assert!(!l.join(a, 9));
        assert_eq!(l.hyperedge("A").unwrap().members(), &[3, 9]);
        assert_eq!(l.memberships_of(9), &[a, b]);
        l.validate().unwrap();
    }

    #[test]
    fn names_are_checked() {
        let mut l = layer();
        l.create_hyperedge("x").unwrap();
        assert!(matches!(l.create_hyperedge("x"), Err(Error::DuplicateHyperedge(_))));
        assert!(matches!(l.create_hyperedge("#layer"), Err(Error::InvalidName(_))));
        assert!(matches!(l.create_hyperedge("a\tb"), Err(Error::InvalidName(_))));
    }
}
