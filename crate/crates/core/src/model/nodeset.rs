use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};

/// Node identifier. IDs are arbitrary and need not be contiguous.
pub type NodeId = u32;

/// A nodeset shared between a session (or caller) and the networks built on it.
pub type SharedNodeset = Arc<RwLock<Nodeset>>;

/// The four attribute value types a node can carry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AttributeValue {
    Int(i32),
    Float(f32),
    Bool(bool),
    Char(char),
}

impl AttributeValue {
    pub fn kind(&self) -> AttributeKind {
        match self {
            AttributeValue::Int(_) => AttributeKind::Int,
            AttributeValue::Float(_) => AttributeKind::Float,
            AttributeValue::Bool(_) => AttributeKind::Bool,
            AttributeValue::Char(_) => AttributeKind::Char,
        }
    }
}

impl fmt::Display for AttributeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AttributeValue::Int(v) => write!(f, "{v}"),
            AttributeValue::Float(v) => write!(f, "{v}"),
            AttributeValue::Bool(v) => write!(f, "{v}"),
            AttributeValue::Char(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttributeKind {
    Int,
    Float,
    Bool,
    Char,
}

impl AttributeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            AttributeKind::Int => "int",
            AttributeKind::Float => "float",
            AttributeKind::Bool => "bool",
            AttributeKind::Char => "char",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "int" => Some(AttributeKind::Int),
            "float" => Some(AttributeKind::Float),
            "bool" => Some(AttributeKind::Bool),
            "char" => Some(AttributeKind::Char),
            _ => None,
        }
    }

    pub(crate) fn tag(&self) -> u8 {
        match self {
            AttributeKind::Int => 0,
            AttributeKind::Float => 1,
            AttributeKind::Bool => 2,
            AttributeKind::Char => 3,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(AttributeKind::Int),
            1 => Some(AttributeKind::Float),
            2 => Some(AttributeKind::Bool),
            3 => Some(AttributeKind::Char),
            _ => None,
        }
    }
}

impl fmt::Display for AttributeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Attribute name bound to a single value kind for the whole nodeset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttributeDef {
    pub name: String,
    pub kind: AttributeKind,
}

/// Index into a nodeset's attribute schema.
pub type AttributeIndex = u16;

/// A population of nodes with sparse, typed attributes.
///
/// Nodes without attributes live in a plain hash set; nodes with at least one
/// attribute live in a map holding only the attributes they actually have.
/// Nodes move between the two as attributes are set and removed.
#[derive(Debug, Clone, Default)]
pub struct Nodeset {
    plain: HashSet<NodeId>,
    attributed: HashMap<NodeId, Vec<(AttributeIndex, AttributeValue)>>,
    schema: Vec<AttributeDef>,
    schema_index: HashMap<String, AttributeIndex>,
}

impl Nodeset {
    pub fn new() -> Self {
        Self::default()
    }

    /// Creates nodes `0..count`.
    pub fn with_count(count: u64) -> Result<Self> {
        if count > u64::from(u32::MAX) + 1 {
            return Err(Error::InvalidParameter(format!(
                "cannot create {count} nodes with 32-bit identifiers"
            )));
        }
        let mut plain = HashSet::with_capacity(count as usize);
        plain.extend((0..count).map(|id| id as NodeId));
        Ok(Self {
            plain,
            ..Self::default()
        })
    }

    pub fn from_ids(ids: impl IntoIterator<Item = NodeId>) -> Result<Self> {
        let mut ns = Self::new();
        for id in ids {
            ns.add_node(id)?;
        }
        Ok(ns)
    }

    pub fn into_shared(self) -> SharedNodeset {
        Arc::new(RwLock::new(self))
    }

    pub fn add_node(&mut self, id: NodeId) -> Result<()> {
        if self.contains(id) {
            return Err(Error::DuplicateNode(id));
        }
        self.plain.insert(id);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.plain.len() + self.attributed.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.plain.contains(&id) || self.attributed.contains_key(&id)
    }

    pub fn ensure_node(&self, id: NodeId) -> Result<()> {
        if self.contains(id) {
            Ok(())
        } else {
            Err(Error::UnknownNode(id))
        }
    }

    /// Nodes without any attribute.
    pub fn plain_len(&self) -> usize {
        self.plain.len()
    }

    /// Nodes carrying at least one attribute.
    pub fn attributed_len(&self) -> usize {
        self.attributed.len()
    }

    pub fn is_attributed(&self, id: NodeId) -> bool {
        self.attributed.contains_key(&id)
    }

    /// Iterates nodes in unspecified order.
    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.plain.iter().chain(self.attributed.keys()).copied()
    }

    pub fn sorted_ids(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = self.iter().collect();
        ids.sort_unstable();
        ids
    }

    pub(crate) fn sorted_plain_ids(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = self.plain.iter().copied().collect();
        ids.sort_unstable();
        ids
    }

    pub fn schema(&self) -> &[AttributeDef] {
        &self.schema
    }

    pub fn attribute_kind(&self, name: &str) -> Option<AttributeKind> {
        self.schema_index
            .get(name)
            .map(|&idx| self.schema[idx as usize].kind)
    }

    pub(crate) fn attribute_index(&self, name: &str) -> Option<AttributeIndex> {
        self.schema_index.get(name).copied()
    }

    /// Registers an attribute name with a kind, or checks it against the
    /// existing registration.
    pub fn define_attribute(&mut self, name: &str, kind: AttributeKind) -> Result<AttributeIndex> {
        if let Some(&idx) = self.schema_index.get(name) {
            let expected = self.schema[idx as usize].kind;
            if expected != kind {
                return Err(Error::TypeMismatch {
                    name: name.to_string(),
                    expected,
                    found: kind,
                });
            }
            return Ok(idx);
        }
        validate_attribute_name(name)?;
        if self.schema.len() > AttributeIndex::MAX as usize {
            return Err(Error::TooManyAttributes {
                limit: AttributeIndex::MAX as usize + 1,
            });
        }
        let idx = self.schema.len() as AttributeIndex;
        self.schema.push(AttributeDef {
            name: name.to_string(),
            kind,
        });
        self.schema_index.insert(name.to_string(), idx);
        Ok(idx)
    }

    pub fn set_attribute(&mut self, node: NodeId, name: &str, value: AttributeValue) -> Result<()> {
        self.ensure_node(node)?;
        let idx = self.define_attribute(name, value.kind())?;
        self.set_by_index(node, idx, value);
        Ok(())
    }

    pub(crate) fn set_by_index(&mut self, node: NodeId, idx: AttributeIndex, value: AttributeValue) {
        if self.plain.remove(&node) {
            self.attributed.insert(node, vec![(idx, value)]);
            return;
        }
        let attrs = self.attributed.entry(node).or_default();
        match attrs.binary_search_by_key(&idx, |(i, _)| *i) {
            Ok(pos) => attrs[pos].1 = value,
            Err(pos) => attrs.insert(pos, (idx, value)),
        }
    }

    /// Returns `None` when the node does not have the attribute.
    pub fn get_attribute(&self, node: NodeId, name: &str) -> Result<Option<AttributeValue>> {
        self.ensure_node(node)?;
        let Some(idx) = self.attribute_index(name) else {
            return Ok(None);
        };
        Ok(self.attributed.get(&node).and_then(|attrs| {
            attrs
                .binary_search_by_key(&idx, |(i, _)| *i)
                .ok()
                .map(|pos| attrs[pos].1)
        }))
    }

    /// Removing an attribute the node lacks is a no-op.
    pub fn remove_attribute(&mut self, node: NodeId, name: &str) -> Result<()> {
        self.ensure_node(node)?;
        let Some(idx) = self.attribute_index(name) else {
            return Ok(());
        };
        let Some(attrs) = self.attributed.get_mut(&node) else {
            return Ok(());
        };
        if let Ok(pos) = attrs.binary_search_by_key(&idx, |(i, _)| *i) {
            attrs.remove(pos);
            if attrs.is_empty() {
                self.attributed.remove(&node);
                self.plain.insert(node);
            }
        }
        Ok(())
    }

    /// Attributes of one node, in schema order.
    pub fn attributes(&self, node: NodeId) -> impl Iterator<Item = (&AttributeDef, AttributeValue)> {
        self.attributed
            .get(&node)
            .into_iter()
            .flatten()
            .map(|(idx, v)| (&self.schema[*idx as usize], *v))
    }

    pub(crate) fn attribute_entries(&self, node: NodeId) -> &[(AttributeIndex, AttributeValue)] {
        self.attributed.get(&node).map(Vec::as_slice).unwrap_or(&[])
    }

    /// All values of one attribute, for nodes that have it (unordered).
    pub fn attribute_values<'a>(&'a self, name: &str) -> impl Iterator<Item = (NodeId, AttributeValue)> + 'a {
        let idx = self.attribute_index(name);
        self.attributed.iter().filter_map(move |(&node, attrs)| {
            let idx = idx?;
            attrs
                .binary_search_by_key(&idx, |(i, _)| *i)
                .ok()
                .map(|pos| (node, attrs[pos].1))
        })
    }

    /// Checks the dual-storage invariants; returns a description of the first
    /// violation found.
    pub fn validate(&self) -> Result<(), String> {
        for (node, attrs) in &self.attributed {
            if self.plain.contains(node) {
                return Err(format!("node {node} is stored both plain and attributed"));
            }
            if attrs.is_empty() {
                return Err(format!("node {node} is attributed without attributes"));
            }
            if !attrs.windows(2).all(|w| w[0].0 < w[1].0) {
                return Err(format!("node {node} has unsorted attribute entries"));
            }
            for (idx, value) in attrs {
                let def = self
                    .schema
                    .get(*idx as usize)
                    .ok_or_else(|| format!("node {node} references unknown attribute {idx}"))?;
                if def.kind != value.kind() {
                    return Err(format!("node {node} holds a {} for '{}'", value.kind(), def.name));
                }
            }
        }
        Ok(())
    }
}

impl PartialEq for Nodeset {
    /// Extensional equality: same nodes with the same attribute values by name.
    fn eq(&self, other: &Self) -> bool {
        if self.len() != other.len() || self.attributed.len() != other.attributed.len() {
            return false;
        }
        if !self.plain.iter().all(|id| other.plain.contains(id)) {
            return false;
        }
        self.attributed.keys().all(|&node| {
            let mut mine: Vec<_> = self.attributes(node).map(|(d, v)| (d.name.as_str(), v)).collect();
            let mut theirs: Vec<_> = other.attributes(node).map(|(d, v)| (d.name.as_str(), v)).collect();
            mine.sort_by(|a, b| a.0.cmp(b.0));
            theirs.sort_by(|a, b| a.0.cmp(b.0));
            mine.len() == theirs.len()
                && mine
                    .iter()
                    .zip(&theirs)
                    .all(|(a, b)| a.0 == b.0 && same_value(a.1, b.1))
        })
    }
}

// NaN floats compare equal to themselves so round-trips of NaN attributes hold.
fn same_value(a: AttributeValue, b: AttributeValue) -> bool {
    match (a, b) {
        (AttributeValue::Float(x), AttributeValue::Float(y)) => x.to_bits() == y.to_bits() || x == y,
        _ => a == b,
    }
}

pub(crate) fn validate_attribute_name(name: &str) -> Result<()> {
    if name.is_empty() || name.contains(['\t', '\n', '\r']) || name.len() > u16::MAX as usize {
        return Err(Error::InvalidName(name.to_string()));
    }
    Ok(())
}
