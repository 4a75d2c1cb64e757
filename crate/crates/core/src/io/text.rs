//! Tab-separated text forms.
//!
//! Nodeset: a header `nodeid<TAB>name:type...` then one row per node, with an
//! empty cell where a node lacks an attribute.
//!
//! Network: one section per layer, opened by
//! `#layer<TAB>name<TAB>mode=1<TAB>directed=f<TAB>valued=t<TAB>selfties=f`
//! (plus `inbound=` on directed layers, just `mode=2` on two-mode layers).
//! One-mode rows are `src<TAB>dst[<TAB>value]`; two-mode rows are
//! `hyperedge<TAB>node`, and empty hyperedges appear as `#hyperedge<TAB>name`.

use std::io::{BufRead, Write};

use super::NodeResolver;
use crate::error::{Error, Result};
use crate::model::{
    read_nodeset as lock_read, AttributeKind, AttributeValue, Layer, LayerMode, LayerSpec, Network, NodeId,
    Nodeset, SharedNodeset,
};

const LAYER_MARK: &str = "#layer";
const HYPEREDGE_MARK: &str = "#hyperedge";

fn flag(b: bool) -> char {
    if b {
        't'
    } else {
        'f'
    }
}

fn escape_char(c: char, out: &mut impl Write) -> std::io::Result<()> {
    match c {
        '\\' => out.write_all(b"\\\\"),
        '\t' => out.write_all(b"\\t"),
        '\n' => out.write_all(b"\\n"),
        '\r' => out.write_all(b"\\r"),
        c => write!(out, "{c}"),
    }
}

fn unescape_char(cell: &str) -> Option<char> {
    let mut chars = cell.chars();
    let first = chars.next()?;
    let c = if first == '\\' {
        match chars.next()? {
            '\\' => '\\',
            't' => '\t',
            'n' => '\n',
            'r' => '\r',
            _ => return None,
        }
    } else {
        first
    };
    chars.next().is_none().then_some(c)
}

fn write_value(value: AttributeValue, out: &mut impl Write) -> std::io::Result<()> {
    match value {
        AttributeValue::Char(c) => escape_char(c, out),
        other => write!(out, "{other}"),
    }
}

fn parse_value(kind: AttributeKind, cell: &str) -> Option<AttributeValue> {
    Some(match kind {
        AttributeKind::Int => AttributeValue::Int(cell.parse().ok()?),
        AttributeKind::Float => AttributeValue::Float(cell.parse().ok()?),
        AttributeKind::Bool => AttributeValue::Bool(match cell {
            "true" => true,
            "false" => false,
            _ => return None,
        }),
        AttributeKind::Char => AttributeValue::Char(unescape_char(cell)?),
    })
}

pub(crate) fn write_nodeset<W: Write>(ns: &Nodeset, out: &mut W) -> Result<()> {
    out.write_all(b"nodeid")?;
    for def in ns.schema() {
        write!(out, "\t{}:{}", def.name, def.kind)?;
    }
    out.write_all(b"\n")?;
    let columns = ns.schema().len();
    for id in ns.sorted_ids() {
        write!(out, "{id}")?;
        let mut entries = ns.attribute_entries(id).iter().peekable();
        for col in 0..columns {
            out.write_all(b"\t")?;
            if let Some(&&(idx, value)) = entries.peek() {
                if idx as usize == col {
                    write_value(value, out)?;
                    entries.next();
                }
            }
        }
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub(crate) fn read_nodeset<R: BufRead>(input: R) -> Result<Nodeset> {
    let mut lines = input.lines();
    let header = lines
        .next()
        .transpose()?
        .ok_or_else(|| Error::MalformedHeader("file is empty".into()))?;
    let header = header.trim_end_matches('\r');
    let mut fields = header.split('\t');
    if fields.next() != Some("nodeid") {
        return Err(Error::MalformedHeader("first column must be 'nodeid'".into()));
    }
    let mut ns = Nodeset::new();
    let mut kinds = Vec::new();
    for field in fields {
        let (name, kind) = field
            .rsplit_once(':')
            .ok_or_else(|| Error::MalformedHeader(format!("column '{field}' is not name:type")))?;
        let kind = AttributeKind::parse(kind)
            .ok_or_else(|| Error::MalformedHeader(format!("unknown attribute type in '{field}'")))?;
        if ns.attribute_kind(name).is_some() {
            return Err(Error::MalformedHeader(format!("duplicate column '{name}'")));
        }
        let idx = ns
            .define_attribute(name, kind)
            .map_err(|e| Error::MalformedHeader(e.to_string()))?;
        kinds.push((idx, kind));
    }

    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut cells = line.split('\t');
        let id_cell = cells.next().unwrap_or_default();
        let id: NodeId = id_cell.parse().map_err(|_| Error::TypeParse {
            line: lineno,
            message: format!("invalid node id '{id_cell}'"),
        })?;
        ns.add_node(id)?;
        let cells: Vec<&str> = cells.collect();
        if cells.len() != kinds.len() {
            return Err(Error::TypeParse {
                line: lineno,
                message: format!("expected {} columns", kinds.len() + 1),
            });
        }
        for (cell, &(idx, kind)) in cells.into_iter().zip(&kinds) {
            if cell.is_empty() {
                continue;
            }
            let value = parse_value(kind, cell).ok_or_else(|| Error::TypeParse {
                line: lineno,
                message: format!("'{cell}' is not a valid {kind}"),
            })?;
            ns.set_by_index(id, idx, value);
        }
    }
    Ok(ns)
}

fn write_layer_header<W: Write>(spec: &LayerSpec, out: &mut W) -> Result<()> {
    write!(out, "{LAYER_MARK}\t{}\tmode={}", spec.name, spec.mode.number())?;
    if spec.mode == LayerMode::OneMode {
        write!(
            out,
            "\tdirected={}\tvalued={}\tselfties={}",
            flag(spec.directed),
            flag(spec.valued),
            flag(spec.allow_self_ties)
        )?;
        if spec.directed {
            write!(out, "\tinbound={}", flag(spec.store_inbound))?;
        }
    }
    out.write_all(b"\n")?;
    Ok(())
}

pub(crate) fn write_layer_body<W: Write>(layer: &Layer, out: &mut W) -> Result<()> {
    match layer {
        Layer::OneMode(l) => {
            let valued = l.is_valued();
            let mut result = Ok(());
            l.for_each_edge(|a, b, v| {
                if result.is_ok() {
                    result = if valued {
                        writeln!(out, "{a}\t{b}\t{v}")
                    } else {
                        writeln!(out, "{a}\t{b}")
                    };
                }
            });
            result?;
        }
        Layer::TwoMode(l) => {
            for id in l.ids_by_name() {
                let he = &l.hyperedges()[id as usize];
                if he.is_empty() {
                    writeln!(out, "{HYPEREDGE_MARK}\t{}", he.name())?;
                }
                for &node in he.members() {
                    writeln!(out, "{}\t{node}", he.name())?;
                }
            }
        }
    }
    Ok(())
}

pub(crate) fn write_network<W: Write>(net: &Network, out: &mut W) -> Result<()> {
    for layer in net.layers() {
        write_layer_header(layer.spec(), out)?;
        write_layer_body(layer, out)?;
    }
    Ok(())
}

fn malformed(line: usize, message: impl Into<String>) -> Error {
    Error::MalformedSection {
        line,
        message: message.into(),
    }
}

fn parse_node(cell: &str, line: usize) -> Result<NodeId> {
    cell.parse().map_err(|_| Error::TypeParse {
        line,
        message: format!("invalid node id '{cell}'"),
    })
}

fn parse_flag(value: &str, line: usize) -> Result<bool> {
    match value {
        "t" | "true" => Ok(true),
        "f" | "false" => Ok(false),
        _ => Err(malformed(line, format!("flag value '{value}' is not t or f"))),
    }
}

fn parse_layer_header(line: &str, lineno: usize) -> Result<LayerSpec> {
    let mut fields = line.split('\t').skip(1);
    let name = fields
        .next()
        .filter(|n| !n.is_empty())
        .ok_or_else(|| malformed(lineno, "layer header without a name"))?;
    let mut spec = LayerSpec::one_mode(name);
    let mut mode = None;
    for field in fields {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| malformed(lineno, format!("header field '{field}' is not key=value")))?;
        match key {
            "mode" => {
                mode = Some(
                    value
                        .parse::<u8>()
                        .ok()
                        .and_then(LayerMode::from_number)
                        .ok_or_else(|| malformed(lineno, format!("mode must be 1 or 2, got '{value}'")))?,
                )
            }
            "directed" => spec.directed = parse_flag(value, lineno)?,
            "valued" => spec.valued = parse_flag(value, lineno)?,
            "selfties" => spec.allow_self_ties = parse_flag(value, lineno)?,
            "inbound" => spec.store_inbound = parse_flag(value, lineno)?,
            _ => {
                return Err(Error::UnknownLayerHeaderKey {
                    line: lineno,
                    key: key.to_string(),
                })
            }
        }
    }
    spec.mode = mode.ok_or_else(|| malformed(lineno, "layer header without mode"))?;
    Ok(spec)
}

/// Applies one body row to a layer.
fn read_body_line(layer: &mut Layer, line: &str, lineno: usize, ns: &Nodeset, resolver: &mut NodeResolver) -> Result<()> {
    match layer {
        Layer::OneMode(l) => {
            let fields: Vec<&str> = line.split('\t').collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(malformed(lineno, "edge rows need 2 or 3 columns"));
            }
            let a = parse_node(fields[0], lineno)?;
            let b = parse_node(fields[1], lineno)?;
            let value = match fields.get(2) {
                Some(cell) if l.is_valued() => cell.parse::<f32>().map_err(|_| Error::TypeParse {
                    line: lineno,
                    message: format!("invalid edge value '{cell}'"),
                })?,
                _ => 1.0,
            };
            resolver.check(ns, a, lineno)?;
            resolver.check(ns, b, lineno)?;
            l.check_insert(a, b, value).map_err(|e| malformed(lineno, e.to_string()))?;
            l.insert_edge(a, b, value);
        }
        Layer::TwoMode(l) => {
            if let Some(name) = line.strip_prefix(HYPEREDGE_MARK).and_then(|r| r.strip_prefix('\t')) {
                if l.hyperedge(name).is_none() {
                    l.create_hyperedge(name).map_err(|e| malformed(lineno, e.to_string()))?;
                }
                return Ok(());
            }
            let (name, node) = line
                .split_once('\t')
                .ok_or_else(|| malformed(lineno, "membership rows need 2 columns"))?;
            let node = parse_node(node, lineno)?;
            resolver.check(ns, node, lineno)?;
            let id = match l.hyperedge_id(name) {
                Ok(id) => id,
                Err(_) => l.create_hyperedge(name).map_err(|e| malformed(lineno, e.to_string()))?,
            };
            l.join(id, node);
        }
    }
    Ok(())
}

pub(crate) fn read_network<R: BufRead>(input: R, ns: &SharedNodeset, resolver: &mut NodeResolver) -> Result<Network> {
    let mut net = Network::new(ns);
    let guard = lock_read(ns);
    let mut current: Option<String> = None;
    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if line == LAYER_MARK || line.starts_with("#layer\t") {
            let spec = parse_layer_header(line, lineno)?;
            let name = spec.name.clone();
            net.add_layer(spec).map_err(|e| malformed(lineno, e.to_string()))?;
            current = Some(name);
            continue;
        }
        let name = current
            .as_deref()
            .ok_or_else(|| malformed(lineno, "row before the first #layer header"))?;
        read_body_line(net.layer_mut(name)?, line, lineno, &guard, resolver)?;
    }
    drop(guard);
    Ok(net)
}

pub(crate) fn read_layer_body<R: BufRead>(input: R, layer: &mut Layer, ns: &Nodeset, resolver: &mut NodeResolver) -> Result<()> {
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        read_body_line(layer, line, i + 1, ns, resolver)?;
    }
    Ok(())
}
