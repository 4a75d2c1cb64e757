//! Little-endian binary forms.
//!
//! Every file starts with the magic `WFT1`, a u16 format version and a u8
//! object kind (0 nodeset, 1 network). Variable-length sections are preceded
//! by their element count; strings by a u16 byte length.

use std::io::{BufRead, ErrorKind, Read, Write};

use super::{NodeResolver, ObjectKind};
use crate::error::{Error, Result};
use crate::model::{
    read_nodeset as lock_read, AttributeKind, AttributeValue, Layer, LayerMode, LayerSpec, Network, NodeId,
    Nodeset, SharedNodeset,
};

pub const BINARY_MAGIC: [u8; 4] = *b"WFT1";
pub const BINARY_VERSION: u16 = 1;

/// Hyperedge references are u16 indices.
const MAX_HYPEREDGES: usize = u16::MAX as usize + 1;
/// Cap on speculative allocation from untrusted counts.
const PREALLOC_LIMIT: usize = 1 << 16;

fn corrupt(message: impl Into<String>) -> Error {
    Error::CorruptBinary(message.into())
}

struct Out<'a, W: Write>(&'a mut W);

impl<W: Write> Out<'_, W> {
    fn u8(&mut self, v: u8) -> Result<()> {
        Ok(self.0.write_all(&[v])?)
    }
    fn u16(&mut self, v: u16) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn u32(&mut self, v: u32) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn u64(&mut self, v: u64) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn f32(&mut self, v: f32) -> Result<()> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn count(&mut self, n: usize, what: &str) -> Result<()> {
        let n = u32::try_from(n).map_err(|_| Error::InvalidParameter(format!("too many {what} for the binary format")))?;
        self.u32(n)
    }
    fn str(&mut self, s: &str) -> Result<()> {
        let len = u16::try_from(s.len())
            .map_err(|_| Error::InvalidParameter(format!("name longer than {} bytes", u16::MAX)))?;
        self.u16(len)?;
        Ok(self.0.write_all(s.as_bytes())?)
    }
    fn header(&mut self, kind: ObjectKind) -> Result<()> {
        self.0.write_all(&BINARY_MAGIC)?;
        self.u16(BINARY_VERSION)?;
        self.u8(match kind {
            ObjectKind::Nodeset => 0,
            ObjectKind::Network => 1,
        })
    }
}

struct In<R: Read>(R);

impl<R: Read> In<R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.0.read_exact(&mut buf).map_err(|e| match e.kind() {
            ErrorKind::UnexpectedEof => corrupt("unexpected end of file"),
            _ => Error::Io(e),
        })?;
        Ok(buf)
    }
    fn u8(&mut self) -> Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }
    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.bytes()?))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.bytes()?))
    }
    fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.bytes()?))
    }
    fn flag(&mut self) -> Result<bool> {
        match self.u8()? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(corrupt(format!("flag byte {other} is not 0 or 1"))),
        }
    }
    fn str(&mut self) -> Result<String> {
        let len = self.u16()? as usize;
        let mut buf = vec![0u8; len];
        self.0.read_exact(&mut buf).map_err(|_| corrupt("unexpected end of file"))?;
        String::from_utf8(buf).map_err(|_| corrupt("name is not valid UTF-8"))
    }
    fn header(&mut self) -> Result<ObjectKind> {
        if self.bytes::<4>()? != BINARY_MAGIC {
            return Err(corrupt("bad magic bytes"));
        }
        let version = self.u16()?;
        if version != BINARY_VERSION {
            return Err(corrupt(format!("unsupported version {version}")));
        }
        match self.u8()? {
            0 => Ok(ObjectKind::Nodeset),
            1 => Ok(ObjectKind::Network),
            other => Err(corrupt(format!("unknown object kind {other}"))),
        }
    }
    fn expect(&mut self, kind: ObjectKind) -> Result<()> {
        let found = self.header()?;
        if found != kind {
            return Err(corrupt(format!("file holds a {found:?}, expected a {kind:?}")));
        }
        Ok(())
    }
    fn end(&mut self) -> Result<()> {
        let mut probe = [0u8; 1];
        match self.0.read(&mut probe)? {
            0 => Ok(()),
            _ => Err(corrupt("trailing bytes after the end of the data")),
        }
    }
}

pub(crate) fn read_kind<R: BufRead>(input: &mut R) -> Result<ObjectKind> {
    In(input).header()
}

fn value_bits(value: AttributeValue) -> u32 {
    match value {
        AttributeValue::Int(v) => v as u32,
        AttributeValue::Float(v) => v.to_bits(),
        AttributeValue::Bool(v) => v as u32,
        AttributeValue::Char(v) => v as u32,
    }
}

fn value_from_bits(kind: AttributeKind, bits: u32) -> Result<AttributeValue> {
    Ok(match kind {
        AttributeKind::Int => AttributeValue::Int(bits as i32),
        AttributeKind::Float => AttributeValue::Float(f32::from_bits(bits)),
        AttributeKind::Bool => match bits {
            0 => AttributeValue::Bool(false),
            1 => AttributeValue::Bool(true),
            _ => return Err(corrupt(format!("bool value {bits} is not 0 or 1"))),
        },
        AttributeKind::Char => {
            AttributeValue::Char(char::from_u32(bits).ok_or_else(|| corrupt(format!("{bits:#x} is not a char")))?)
        }
    })
}

pub(crate) fn write_nodeset<W: Write>(ns: &Nodeset, out: &mut W) -> Result<()> {
    let mut o = Out(out);
    o.header(ObjectKind::Nodeset)?;
    let plain = ns.sorted_plain_ids();
    o.count(plain.len(), "nodes")?;
    for id in plain {
        o.u32(id)?;
    }
    o.count(ns.schema().len(), "attributes")?;
    for def in ns.schema() {
        o.str(&def.name)?;
        o.u8(def.kind.tag())?;
    }
    let attributed: Vec<NodeId> = ns.sorted_ids().into_iter().filter(|&id| ns.is_attributed(id)).collect();
    o.count(attributed.len(), "nodes")?;
    for id in attributed {
        let entries = ns.attribute_entries(id);
        o.u32(id)?;
        o.u16(entries.len() as u16)?;
        for &(idx, value) in entries {
            o.u16(idx)?;
            o.u32(value_bits(value))?;
        }
    }
    Ok(())
}

pub(crate) fn read_nodeset<R: BufRead>(input: R) -> Result<Nodeset> {
    let mut r = In(input);
    r.expect(ObjectKind::Nodeset)?;
    let mut ns = Nodeset::new();
    let plain = r.u32()?;
    for _ in 0..plain {
        let id = r.u32()?;
        ns.add_node(id).map_err(|_| corrupt(format!("node {id} appears twice")))?;
    }
    let schema_len = r.u32()?;
    let mut kinds = Vec::with_capacity((schema_len as usize).min(PREALLOC_LIMIT));
    for _ in 0..schema_len {
        let name = r.str()?;
        let tag = r.u8()?;
        let kind = AttributeKind::from_tag(tag).ok_or_else(|| corrupt(format!("unknown attribute type tag {tag}")))?;
        if ns.attribute_kind(&name).is_some() {
            return Err(corrupt(format!("attribute '{name}' defined twice")));
        }
        ns.define_attribute(&name, kind).map_err(|e| corrupt(e.to_string()))?;
        kinds.push(kind);
    }
    let attributed = r.u32()?;
    for _ in 0..attributed {
        let id = r.u32()?;
        if ns.contains(id) {
            return Err(corrupt(format!("node {id} appears twice")));
        }
        let count = r.u16()?;
        if count == 0 {
            return Err(corrupt(format!("attributed node {id} has no attributes")));
        }
        let mut last = None;
        for _ in 0..count {
            let idx = r.u16()?;
            let kind = *kinds
                .get(idx as usize)
                .ok_or_else(|| corrupt(format!("attribute index {idx} out of range")))?;
            if last.is_some_and(|l| l >= idx) {
                return Err(corrupt(format!("attributes of node {id} are not in ascending order")));
            }
            last = Some(idx);
            let value = value_from_bits(kind, r.u32()?)?;
            ns.set_by_index(id, idx, value);
        }
    }
    r.end()?;
    Ok(ns)
}

pub(crate) fn write_network<W: Write>(net: &Network, out: &mut W) -> Result<()> {
    let mut o = Out(out);
    o.header(ObjectKind::Network)?;
    let count = u16::try_from(net.layer_count())
        .map_err(|_| Error::InvalidParameter("too many layers for the binary format".into()))?;
    o.u16(count)?;
    for layer in net.layers() {
        let spec = layer.spec();
        o.str(&spec.name)?;
        o.u8(spec.mode.number())?;
        match layer {
            Layer::OneMode(l) => {
                for f in [spec.directed, spec.valued, spec.allow_self_ties, spec.store_inbound] {
                    o.u8(f as u8)?;
                }
                o.u64(l.edge_count())?;
                let valued = l.is_valued();
                let mut result: Result<()> = Ok(());
                l.for_each_edge(|a, b, v| {
                    if result.is_ok() {
                        result = (|| {
                            o.u32(a)?;
                            o.u32(b)?;
                            if valued {
                                o.f32(v)?;
                            }
                            Ok(())
                        })();
                    }
                });
                result?;
            }
            Layer::TwoMode(l) => {
                if l.hyperedge_count() > MAX_HYPEREDGES {
                    return Err(Error::InvalidParameter(format!(
                        "layer '{}' has more than {MAX_HYPEREDGES} hyperedges",
                        spec.name
                    )));
                }
                let order = l.ids_by_name();
                o.count(order.len(), "hyperedges")?;
                for &id in &order {
                    o.str(l.hyperedges()[id as usize].name())?;
                }
                o.u64(l.membership_count())?;
                for (pos, &id) in order.iter().enumerate() {
                    for &node in l.hyperedges()[id as usize].members() {
                        o.u16(pos as u16)?;
                        o.u32(node)?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Node errors report the 1-based record number within the layer in place of
/// a line number.
pub(crate) fn read_network<R: BufRead>(input: R, ns: &SharedNodeset, resolver: &mut NodeResolver) -> Result<Network> {
    let mut r = In(input);
    r.expect(ObjectKind::Network)?;
    let mut net = Network::new(ns);
    let guard = lock_read(ns);
    let layers = r.u16()?;
    for _ in 0..layers {
        let name = r.str()?;
        let mode_byte = r.u8()?;
        let mode = LayerMode::from_number(mode_byte).ok_or_else(|| corrupt(format!("unknown layer mode {mode_byte}")))?;
        match mode {
            LayerMode::OneMode => {
                let spec = LayerSpec::one_mode(name.clone())
                    .directed(r.flag()?)
                    .valued(r.flag()?)
                    .self_ties(r.flag()?)
                    .store_inbound(r.flag()?);
                let valued = spec.valued;
                net.add_layer(spec).map_err(|e| corrupt(e.to_string()))?;
                let Layer::OneMode(l) = net.layer_mut(&name)? else { unreachable!() };
                let edges = r.u64()?;
                for record in 1..=edges {
                    let a = r.u32()?;
                    let b = r.u32()?;
                    let v = if valued { r.f32()? } else { 1.0 };
                    resolver.check(&guard, a, record as usize)?;
                    resolver.check(&guard, b, record as usize)?;
                    l.check_insert(a, b, v).map_err(|e| corrupt(e.to_string()))?;
                    if !l.insert_edge(a, b, v) {
                        return Err(corrupt(format!("edge {a}-{b} in layer '{name}' appears twice")));
                    }
                }
            }
            LayerMode::TwoMode => {
                net.add_layer(LayerSpec::two_mode(name.clone())).map_err(|e| corrupt(e.to_string()))?;
                let Layer::TwoMode(l) = net.layer_mut(&name)? else { unreachable!() };
                let count = r.u32()? as usize;
                if count > MAX_HYPEREDGES {
                    return Err(corrupt(format!("{count} hyperedges exceed the limit of {MAX_HYPEREDGES}")));
                }
                let mut ids = Vec::with_capacity(count.min(PREALLOC_LIMIT));
                for _ in 0..count {
                    let he = r.str()?;
                    ids.push(l.create_hyperedge(&he).map_err(|e| corrupt(e.to_string()))?);
                }
                let memberships = r.u64()?;
                for record in 1..=memberships {
                    let idx = r.u16()? as usize;
                    let node = r.u32()?;
                    let id = *ids
                        .get(idx)
                        .ok_or_else(|| corrupt(format!("hyperedge index {idx} out of range")))?;
                    resolver.check(&guard, node, record as usize)?;
                    if !l.join(id, node) {
                        return Err(corrupt(format!("membership of node {node} appears twice")));
                    }
                }
            }
        }
    }
    drop(guard);
    r.end()?;
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::MissingNodes;

    fn sample() -> (SharedNodeset, Network) {
        let mut ns = Nodeset::with_count(8).unwrap();
        ns.set_attribute(2, "age", AttributeValue::Int(-4)).unwrap();
        ns.set_attribute(2, "ok", AttributeValue::Bool(true)).unwrap();
        ns.set_attribute(5, "w", AttributeValue::Float(0.25)).unwrap();
        ns.set_attribute(6, "c", AttributeValue::Char('ß')).unwrap();
        let ns = ns.into_shared();
        let mut net = Network::new(&ns);
        net.add_layer(LayerSpec::one_mode("D").directed(true).valued(true).self_ties(true))
            .unwrap();
        net.add_layer(LayerSpec::two_mode("W")).unwrap();
        net.add_edge("D", 3, 3, 2.5).unwrap();
        net.add_edge("D", 4, 1, -1.0).unwrap();
        net.add_hyperedge("W", "z", &[1, 2]).unwrap();
        net.add_hyperedge("W", "a", &[]).unwrap();
        (ns, net)
    }

    fn bytes_of(net: &Network) -> Vec<u8> {
        let mut buf = Vec::new();
        write_network(net, &mut buf).unwrap();
        buf
    }

    #[test]
    fn nodeset_round_trip() {
        let (ns, _) = sample();
        let ns = lock_read(&ns).clone();
        let mut buf = Vec::new();
        write_nodeset(&ns, &mut buf).unwrap();
        assert_eq!(&buf[..4], b"WFT1");
        assert_eq!(buf[6], 0);
        let back = read_nodeset(buf.as_slice()).unwrap();
        assert_eq!(back, ns);
        back.validate().unwrap();
    }

    #[test]
    fn network_round_trip_and_layout() {
        let (ns, net) = sample();
        let buf = bytes_of(&net);
        assert_eq!(buf[6], 1);
        assert_eq!(u16::from_le_bytes([buf[7], buf[8]]), 2);
        let back = crate::io::read_network(buf.as_slice(), true, &ns, MissingNodes::Reject).unwrap();
        assert!(back.same_layers(&net));
        assert_eq!(bytes_of(&back), buf);
    }

    #[test]
    fn wrong_kind_and_magic() {
        let (ns, net) = sample();
        let buf = bytes_of(&net);
        assert!(matches!(read_nodeset(buf.as_slice()), Err(Error::CorruptBinary(_))));
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(
            crate::io::read_network(bad.as_slice(), true, &ns, MissingNodes::Reject),
            Err(Error::CorruptBinary(_))
        ));
        assert_eq!(read_kind(&mut buf.as_slice()).unwrap(), ObjectKind::Network);
    }

    #[test]
    fn truncation_and_trailing_bytes_are_rejected() {
        let (ns, net) = sample();
        let buf = bytes_of(&net);
        for cut in 0..buf.len() {
            let r = crate::io::read_network(&buf[..cut], true, &ns, MissingNodes::Reject);
            assert!(matches!(r, Err(Error::CorruptBinary(_))), "cut at {cut}");
        }
        let mut long = buf.clone();
        long.push(0);
        assert!(matches!(
            crate::io::read_network(long.as_slice(), true, &ns, MissingNodes::Reject),
            Err(Error::CorruptBinary(_))
        ));
    }

    #[test]
    fn unknown_nodes_rejected() {
        let (_, net) = sample();
        let buf = bytes_of(&net);
        let small = Nodeset::with_count(2).unwrap().into_shared();
        assert!(matches!(
            crate::io::read_network(buf.as_slice(), true, &small, MissingNodes::Reject),
            Err(Error::UnknownNodeInEdge { .. })
        ));
    }
}
