//! Named objects, command dispatch and output rendering.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{RwLockReadGuard, RwLockWriteGuard};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value as Json};
use weft_core::generators::{self, GeneratorParams, Seed};
use weft_core::io::{self as wio, MissingNodes, ObjectKind};
use weft_core::model::{
    AttributeKind, AttributeValue, Layer, LayerMode, LayerSpec, Network, Nodeset, SharedNodeset, Traversal,
};
use weft_core::processing::{self, SymmetrizeMethod};
use weft_core::query::{self, AttributeSummary, LayerSelection};

use crate::args::Params;
use crate::error::CommandError;
use crate::parser::{parse_line, Statement, Value};

type CmdResult = Result<Outcome, CommandError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputMode {
    #[default]
    Text,
    Json,
}

impl OutputMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            OutputMode::Text => "text",
            OutputMode::Json => "json",
        }
    }
}

pub enum Object {
    Nodeset(SharedNodeset),
    Network(Network),
}

impl Object {
    pub fn type_name(&self) -> &'static str {
        match self {
            Object::Nodeset(_) => "nodeset",
            Object::Network(_) => "network",
        }
    }
}

/// One line of the JSON protocol. Field order is the wire order.
#[derive(Debug, Clone, PartialEq, Serialize, serde::Deserialize)]
pub struct Response {
    pub status: String,
    pub command: Option<String>,
    pub result: Json,
    pub error: Option<String>,
}

/// What a successful command produced: a JSON value and its text rendering.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub result: Json,
    pub text: String,
}

impl Outcome {
    fn new(result: Json, text: impl Into<String>) -> Self {
        Self {
            result,
            text: text.into(),
        }
    }

    fn done(text: impl Into<String>) -> Self {
        Self::new(Json::Null, text)
    }
}

/// Tally of a script run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScriptReport {
    pub statements: usize,
    pub errors: usize,
    /// Text mode stops at the first failing statement.
    pub aborted: bool,
}

const MAX_SCRIPT_DEPTH: usize = 16;

const COMMANDS: &[(&str, &str)] = &[
    ("createnodeset", "name = createnodeset(createnodes = 0)"),
    ("createnetwork", "name = createnetwork(nodeset)"),
    ("addlayer", "addlayer(network, layername, mode = 1, directed = false, valued = false, selfties = false, inbound = true)"),
    ("deletelayer", "deletelayer(network, layername)"),
    ("generate", "generate(network, layername, type = er|ws|ba|2mode, p, k, beta, m, h, a, seed)"),
    ("addedge", "addedge(network, layername, node1, node2, value = 1)"),
    ("removeedge", "removeedge(network, layername, node1, node2)"),
    ("addhyperedge", "addhyperedge(network, layername, hyperedge, nodes = id;id;...)"),
    ("addtohyperedge", "addtohyperedge(network, layername, hyperedge, node)"),
    ("removefromhyperedge", "removefromhyperedge(network, layername, hyperedge, node)"),
    ("checkedge", "checkedge(network, layername, node1, node2, direction = both|out|in)"),
    ("getedge", "getedge(network, layername, node1, node2)"),
    ("getnodealters", "getnodealters(network, node, layernames = all, direction = both)"),
    ("degree", "degree(network, layername, node, direction = both, projected = false)"),
    ("density", "density(network, layername)"),
    ("components", "components(network, layernames = all)"),
    ("shortestpath", "shortestpath(network, node1, node2, layernames = all)"),
    ("projectedsize", "projectedsize(network, layername)"),
    ("setattribute", "setattribute(nodeset, node, attribute, value, type = int|float|bool|char)"),
    ("getattribute", "getattribute(nodeset, node, attribute)"),
    ("removeattribute", "removeattribute(nodeset, node, attribute)"),
    ("summarizeattribute", "summarizeattribute(nodeset, attribute)"),
    ("symmetrize", "symmetrize(network, layername, method = max|min|sum|or)"),
    ("dichotomize", "dichotomize(network, layername, threshold, above = true)"),
    ("filteredges", "filteredges(network, layername, min, max)"),
    ("savefile", "savefile(object, file)"),
    ("loadfile", "name = loadfile(file, type = auto|nodeset|network, nodeset, autocreate = false)"),
    ("exportlayer", "exportlayer(network, layername, file)"),
    ("importlayer", "importlayer(network, layername, file)"),
    ("info", "info(object)"),
    ("listobjects", "listobjects()"),
    ("deleteobject", "deleteobject(object)"),
    ("outputmode", "outputmode(mode = text|json)"),
    ("runscript", "runscript(file)"),
    ("help", "help(command)"),
    ("quit", "quit()"),
];

fn read_lock(ns: &SharedNodeset) -> RwLockReadGuard<'_, Nodeset> {
    ns.read().unwrap_or_else(|e| e.into_inner())
}

fn write_lock(ns: &SharedNodeset) -> RwLockWriteGuard<'_, Nodeset> {
    ns.write().unwrap_or_else(|e| e.into_inner())
}

/// JSON number for an f32, using its shortest decimal form.
fn f32_json(v: f32) -> Json {
    if v.is_finite() {
        json!(v.to_string().parse::<f64>().unwrap_or(v as f64))
    } else {
        Json::Null
    }
}

fn f64_json(v: f64) -> Json {
    if v.is_finite() {
        json!(v)
    } else {
        Json::Null
    }
}

fn attribute_json(v: AttributeValue) -> Json {
    match v {
        AttributeValue::Int(i) => json!(i),
        AttributeValue::Float(f) => f32_json(f),
        AttributeValue::Bool(b) => json!(b),
        AttributeValue::Char(c) => json!(c.to_string()),
    }
}

/// Text mode lists at most this many IDs.
const TEXT_ID_LIMIT: usize = 20;

fn join_ids(ids: &[u32]) -> String {
    let mut s = ids.iter().take(TEXT_ID_LIMIT).map(u32::to_string).collect::<Vec<_>>().join(" ");
    if ids.len() > TEXT_ID_LIMIT {
        s += " ...";
    }
    s
}

fn traversal(p: &Params) -> Result<Traversal, CommandError> {
    match p.opt_text("direction")? {
        None => Ok(Traversal::Both),
        Some(s) => Traversal::parse(&s)
            .ok_or_else(|| CommandError::Type(format!("direction must be both, out or in, got '{s}'"))),
    }
}

fn selection(p: &Params) -> Result<LayerSelection, CommandError> {
    Ok(match p.texts("layernames")? {
        None => LayerSelection::All,
        Some(names) => LayerSelection::Named(names),
    })
}

fn layer_json(layer: &Layer) -> Json {
    let spec = layer.spec();
    match layer {
        Layer::OneMode(l) => json!({
            "name": spec.name,
            "mode": 1,
            "directed": spec.directed,
            "valued": spec.valued,
            "selfties": spec.allow_self_ties,
            "inbound": l.has_inbound(),
            "edges": l.edge_count(),
        }),
        Layer::TwoMode(l) => json!({
            "name": spec.name,
            "mode": 2,
            "hyperedges": l.hyperedge_count(),
            "memberships": l.membership_count(),
        }),
    }
}

fn layer_text(layer: &Layer) -> String {
    match layer {
        Layer::OneMode(l) => format!(
            "  {} (one-mode, {}, {}): {} edges",
            l.name(),
            if l.is_directed() { "directed" } else { "symmetric" },
            if l.is_valued() { "valued" } else { "binary" },
            l.edge_count()
        ),
        Layer::TwoMode(l) => format!(
            "  {} (two-mode): {} hyperedges, {} memberships",
            l.name(),
            l.hyperedge_count(),
            l.membership_count()
        ),
    }
}

/// An interpreter session: named objects plus the current output mode.
pub struct Session {
    objects: BTreeMap<String, Object>,
    mode: OutputMode,
    base_dir: PathBuf,
    last_error: Option<String>,
    quit: bool,
    depth: usize,
}

impl Default for Session {
    fn default() -> Self {
        Self::new()
    }
}

impl Session {
    pub fn new() -> Self {
        Self::with_base_dir(".")
    }

    /// Relative file names in commands resolve against `dir`.
    pub fn with_base_dir(dir: impl Into<PathBuf>) -> Self {
        Self {
            objects: BTreeMap::new(),
            mode: OutputMode::Text,
            base_dir: dir.into(),
            last_error: None,
            quit: false,
            depth: 0,
        }
    }

    pub fn mode(&self) -> OutputMode {
        self.mode
    }

    pub fn set_mode(&mut self, mode: OutputMode) {
        self.mode = mode;
    }

    pub fn should_quit(&self) -> bool {
        self.quit
    }

    pub fn last_error(&self) -> Option<&str> {
        self.last_error.as_deref()
    }

    pub fn object(&self, name: &str) -> Option<&Object> {
        self.objects.get(name)
    }

    pub fn object_names(&self) -> impl Iterator<Item = &str> {
        self.objects.keys().map(String::as_str)
    }

    fn path(&self, file: &str) -> PathBuf {
        self.base_dir.join(file)
    }

    /// Parses and runs one line, writing its rendering to `out`. Returns
    /// `None` for blank lines and comments, otherwise whether it succeeded.
    pub fn execute_line(&mut self, line: &str, out: &mut dyn Write) -> io::Result<Option<bool>> {
        self.execute_line_at(line, None, out)
    }

    fn execute_line_at(&mut self, line: &str, lineno: Option<usize>, out: &mut dyn Write) -> io::Result<Option<bool>> {
        let (command, result) = match parse_line(line) {
            Ok(None) => return Ok(None),
            Ok(Some(stmt)) => {
                let command = stmt.command.clone();
                (Some(command), self.execute(stmt, out))
            }
            Err(e) => (None, Err(CommandError::Syntax(e))),
        };
        let ok = result.is_ok();
        self.render(command, result, lineno, out)?;
        Ok(Some(ok))
    }

    fn render(&mut self, command: Option<String>, result: CmdResult, lineno: Option<usize>, out: &mut dyn Write) -> io::Result<()> {
        let error = result.as_ref().err().map(|e| match lineno {
            Some(n) => format!("line {n}: {e}"),
            None => e.to_string(),
        });
        self.last_error = error.clone();
        match self.mode {
            OutputMode::Json => {
                let response = match result {
                    Ok(o) => Response {
                        status: "ok".into(),
                        command,
                        result: o.result,
                        error: None,
                    },
                    Err(_) => Response {
                        status: "error".into(),
                        command,
                        result: Json::Null,
                        error,
                    },
                };
                serde_json::to_writer(&mut *out, &response)?;
                out.write_all(b"\n")?;
            }
            OutputMode::Text => match result {
                Ok(o) if o.text.is_empty() => {}
                Ok(o) => writeln!(out, "{}", o.text)?,
                Err(e) => match lineno {
                    Some(n) => writeln!(out, "Error on line {n}: {e}")?,
                    None => writeln!(out, "Error: {e}")?,
                },
            },
        }
        out.flush()
    }

    /// Runs every statement of a script. Text mode stops at the first error;
    /// Json mode reports each statement and carries on.
    pub fn run_script_text(&mut self, script: &str, out: &mut dyn Write) -> io::Result<ScriptReport> {
        let mut report = ScriptReport::default();
        for (i, line) in script.lines().enumerate() {
            if self.quit {
                break;
            }
            match self.execute_line_at(line, Some(i + 1), out)? {
                None => {}
                Some(ok) => {
                    report.statements += 1;
                    if !ok {
                        report.errors += 1;
                        if self.mode == OutputMode::Text {
                            report.aborted = true;
                            break;
                        }
                    }
                }
            }
        }
        Ok(report)
    }

    pub fn run_script(&mut self, path: impl AsRef<Path>, out: &mut dyn Write) -> io::Result<ScriptReport> {
        let text = std::fs::read_to_string(path)?;
        self.run_script_text(&text, out)
    }

    /// Runs a parsed statement, binding its result when it has a target.
    pub fn execute(&mut self, stmt: Statement, out: &mut dyn Write) -> CmdResult {
        let Statement { target, command, args } = stmt;
        let p = |params: &[&'static str]| Params::bind(&command, args.clone(), params);
        let creates = matches!(command.as_str(), "createnodeset" | "createnetwork" | "loadfile");
        if target.is_some() && !creates {
            return Err(CommandError::Type(format!("{command} does not produce an object to assign")));
        }
        if creates && target.is_none() {
            return Err(CommandError::Arity(format!(
                "{command} needs a name to bind the result to, as in x = {command}(...)"
            )));
        }
        let target = target.unwrap_or_default();
        match command.as_str() {
            "createnodeset" => self.create_nodeset(target, p(&["createnodes"])?),
            "createnetwork" => self.create_network(target, p(&["nodeset"])?),
            "loadfile" => self.load_file(target, p(&["file", "type", "nodeset", "autocreate"])?),
            "addlayer" => self.add_layer(p(&["network", "layername", "mode", "directed", "valued", "selfties", "inbound"])?),
            "deletelayer" => {
                let p = p(&["network", "layername"])?;
                let name = p.text("layername")?;
                self.network_mut(&p)?.remove_layer(&name)?;
                Ok(Outcome::done(format!("Deleted layer '{name}'")))
            }
            "generate" => self.generate(p(&["network", "layername", "type", "p", "k", "beta", "m", "h", "a", "seed"])?),
            "addedge" => {
                let p = p(&["network", "layername", "node1", "node2", "value"])?;
                let (layer, a, b) = (p.text("layername")?, p.node("node1")?, p.node("node2")?);
                let value = p.opt_f32("value")?.unwrap_or(1.0);
                self.network_mut(&p)?.add_edge(&layer, a, b, value)?;
                Ok(Outcome::done(""))
            }
            "removeedge" => {
                let p = p(&["network", "layername", "node1", "node2"])?;
                let (layer, a, b) = (p.text("layername")?, p.node("node1")?, p.node("node2")?);
                self.network_mut(&p)?.remove_edge(&layer, a, b)?;
                Ok(Outcome::done(""))
            }
            "addhyperedge" => {
                let p = p(&["network", "layername", "hyperedge", "nodes"])?;
                let (layer, name, nodes) = (p.text("layername")?, p.text("hyperedge")?, p.nodes("nodes")?);
                self.network_mut(&p)?.add_hyperedge(&layer, &name, &nodes)?;
                Ok(Outcome::done(""))
            }
            "addtohyperedge" | "removefromhyperedge" => {
                let p = p(&["network", "layername", "hyperedge", "node"])?;
                let (layer, name, node) = (p.text("layername")?, p.text("hyperedge")?, p.node("node")?);
                let net = self.network_mut(&p)?;
                if command == "addtohyperedge" {
                    net.add_to_hyperedge(&layer, &name, node)?;
                } else {
                    net.remove_from_hyperedge(&layer, &name, node)?;
                }
                Ok(Outcome::done(""))
            }
            "checkedge" => {
                let p = p(&["network", "layername", "node1", "node2", "direction"])?;
                let (layer, a, b) = (p.text("layername")?, p.node("node1")?, p.node("node2")?);
                let t = traversal(&p)?;
                let exists = self.network(&p)?.check_edge_exists(&layer, a, b, t)?;
                Ok(Outcome::new(json!(exists), exists.to_string()))
            }
            "getedge" => {
                let p = p(&["network", "layername", "node1", "node2"])?;
                let (layer, a, b) = (p.text("layername")?, p.node("node1")?, p.node("node2")?);
                let v = self.network(&p)?.get_edge_value(&layer, a, b)?;
                Ok(Outcome::new(f32_json(v), v.to_string()))
            }
            "getnodealters" => {
                let p = p(&["network", "node", "layernames", "direction"])?;
                let node = p.node("node")?;
                let (sel, t) = (selection(&p)?, traversal(&p)?);
                let alters = self.network(&p)?.get_node_alters(node, &sel, t)?;
                let text = format!("{} alters: {}", alters.len(), join_ids(&alters));
                Ok(Outcome::new(json!(alters), text.trim_end()))
            }
            "degree" => {
                let p = p(&["network", "layername", "node", "direction", "projected"])?;
                let (layer, node) = (p.text("layername")?, p.node("node")?);
                let (t, projected) = (traversal(&p)?, p.bool_or("projected", false)?);
                let d = query::degree(self.network(&p)?, &layer, node, t, projected)?;
                Ok(Outcome::new(json!(d), d.to_string()))
            }
            "density" => {
                let p = p(&["network", "layername"])?;
                let layer = p.text("layername")?;
                let d = query::density(self.network(&p)?, &layer)?;
                Ok(Outcome::new(f64_json(d), d.to_string()))
            }
            "components" => {
                let p = p(&["network", "layernames"])?;
                let sel = selection(&p)?;
                let c = query::connected_components(self.network(&p)?, &sel)?;
                let largest = c.sizes().values().copied().max().unwrap_or(0);
                let count = c.count();
                Ok(Outcome::new(
                    json!({"count": count, "largest": largest}),
                    format!("{count} components (largest has {largest} nodes)"),
                ))
            }
            "shortestpath" => {
                let p = p(&["network", "node1", "node2", "layernames"])?;
                let (a, b, sel) = (p.node("node1")?, p.node("node2")?, selection(&p)?);
                Ok(match query::shortest_path(self.network(&p)?, a, b, &sel)? {
                    Some(path) => Outcome::new(
                        json!({"reachable": true, "length": path.length, "nodes": path.nodes}),
                        format!("length {}: {}", path.length, join_ids(&path.nodes)),
                    ),
                    None => Outcome::new(
                        json!({"reachable": false, "length": null, "nodes": []}),
                        format!("no path from {a} to {b}"),
                    ),
                })
            }
            "projectedsize" => {
                let p = p(&["network", "layername"])?;
                let layer = p.text("layername")?;
                let n = self.network(&p)?.projected_edge_count(&layer)?;
                Ok(Outcome::new(json!(n), n.to_string()))
            }
            "setattribute" => self.set_attribute(p(&["nodeset", "node", "attribute", "value", "type"])?),
            "getattribute" => {
                let p = p(&["nodeset", "node", "attribute"])?;
                let (node, name) = (p.node("node")?, p.text("attribute")?);
                let ns = self.nodeset_of(&p)?;
                let v = read_lock(&ns).get_attribute(node, &name)?;
                Ok(match v {
                    Some(v) => Outcome::new(attribute_json(v), v.to_string()),
                    None => Outcome::new(Json::Null, "(not set)"),
                })
            }
            "removeattribute" => {
                let p = p(&["nodeset", "node", "attribute"])?;
                let (node, name) = (p.node("node")?, p.text("attribute")?);
                let ns = self.nodeset_of(&p)?;
                write_lock(&ns).remove_attribute(node, &name)?;
                Ok(Outcome::done(""))
            }
            "summarizeattribute" => {
                let p = p(&["nodeset", "attribute"])?;
                let name = p.text("attribute")?;
                let ns = self.nodeset_of(&p)?;
                let summary = query::summarize_attribute(&read_lock(&ns), &name)?;
                Ok(summary_outcome(&name, &summary))
            }
            "symmetrize" => {
                let p = p(&["network", "layername", "method"])?;
                let layer = p.text("layername")?;
                let method = match p.opt_text("method")? {
                    None => SymmetrizeMethod::Max,
                    Some(m) => SymmetrizeMethod::parse(&m)
                        .ok_or_else(|| CommandError::Type(format!("method must be max, min, sum or or, got '{m}'")))?,
                };
                let net = self.network_mut(&p)?;
                processing::symmetrize(net, &layer, method)?;
                let edges = net.one_mode(&layer)?.edge_count();
                Ok(Outcome::new(json!({"edges": edges}), format!("'{layer}' is symmetric with {edges} edges")))
            }
            "dichotomize" => {
                let p = p(&["network", "layername", "threshold", "above"])?;
                let (layer, t, above) = (p.text("layername")?, p.f32("threshold")?, p.bool_or("above", true)?);
                let net = self.network_mut(&p)?;
                processing::dichotomize(net, &layer, t, above)?;
                let edges = net.one_mode(&layer)?.edge_count();
                Ok(Outcome::new(json!({"edges": edges}), format!("'{layer}' is binary with {edges} edges")))
            }
            "filteredges" => {
                let p = p(&["network", "layername", "min", "max"])?;
                let (layer, lo, hi) = (p.text("layername")?, p.opt_f32("min")?, p.opt_f32("max")?);
                let net = self.network_mut(&p)?;
                processing::filter_edges(net, &layer, lo, hi)?;
                let edges = net.one_mode(&layer)?.edge_count();
                Ok(Outcome::new(json!({"edges": edges}), format!("'{layer}' keeps {edges} edges")))
            }
            "savefile" => {
                let p = p(&["object", "file"])?;
                let (name, file) = (p.text("object")?, p.text("file")?);
                let path = self.path(&file);
                let kind = match self.objects.get(&name).ok_or(CommandError::UnknownObject(name.clone()))? {
                    Object::Nodeset(ns) => {
                        wio::save_nodeset(&read_lock(ns), &path)?;
                        "nodeset"
                    }
                    Object::Network(net) => {
                        net.nodeset()?;
                        wio::save_network(net, &path)?;
                        "network"
                    }
                };
                Ok(Outcome::new(
                    json!({"file": file, "type": kind}),
                    format!("Saved {kind} '{name}' to {file}"),
                ))
            }
            "exportlayer" | "importlayer" => {
                let p = p(&["network", "layername", "file"])?;
                let (layer, file) = (p.text("layername")?, p.text("file")?);
                let path = self.path(&file);
                if command == "exportlayer" {
                    wio::export_layer(self.network(&p)?, &layer, &path)?;
                    Ok(Outcome::done(format!("Exported layer '{layer}' to {file}")))
                } else {
                    wio::import_layer(self.network_mut(&p)?, &layer, &path)?;
                    Ok(Outcome::done(format!("Imported layer '{layer}' from {file}")))
                }
            }
            "info" => self.info(p(&["object"])?),
            "listobjects" => {
                p(&[])?;
                let list: Vec<Json> = self
                    .objects
                    .iter()
                    .map(|(name, o)| json!({"name": name, "type": o.type_name()}))
                    .collect();
                let text = self
                    .objects
                    .iter()
                    .map(|(name, o)| format!("{name} ({})", o.type_name()))
                    .collect::<Vec<_>>()
                    .join("\n");
                Ok(Outcome::new(Json::Array(list), if text.is_empty() { "(no objects)".into() } else { text }))
            }
            "deleteobject" => {
                let p = p(&["object"])?;
                let name = p.text("object")?;
                let invalidated: Vec<String> = match self.objects.get(&name) {
                    None => return Err(CommandError::UnknownObject(name)),
                    Some(Object::Nodeset(ns)) => self
                        .objects
                        .iter()
                        .filter_map(|(n, o)| match o {
                            Object::Network(net) if net.uses_nodeset(ns) => Some(n.clone()),
                            _ => None,
                        })
                        .collect(),
                    Some(Object::Network(_)) => Vec::new(),
                };
                self.objects.remove(&name);
                let mut text = format!("Deleted '{name}'");
                if !invalidated.is_empty() {
                    text += &format!("; networks {} can no longer be used", invalidated.join(", "));
                }
                Ok(Outcome::new(json!({"deleted": name, "invalidated": invalidated}), text))
            }
            "outputmode" => {
                let p = p(&["mode"])?;
                if let Some(m) = p.opt_text("mode")? {
                    self.mode = match m.to_ascii_lowercase().as_str() {
                        "text" => OutputMode::Text,
                        "json" => OutputMode::Json,
                        _ => return Err(CommandError::Type(format!("mode must be text or json, got '{m}'"))),
                    };
                }
                Ok(Outcome::new(json!(self.mode.as_str()), format!("Output mode: {}", self.mode.as_str())))
            }
            "runscript" => {
                let p = p(&["file"])?;
                let file = p.text("file")?;
                if self.depth >= MAX_SCRIPT_DEPTH {
                    return Err(CommandError::Arity(format!("scripts nested deeper than {MAX_SCRIPT_DEPTH}")));
                }
                let text = std::fs::read_to_string(self.path(&file)).map_err(weft_core::Error::Io)?;
                self.depth += 1;
                let report = self.run_script_text(&text, out);
                self.depth -= 1;
                let report = report.map_err(weft_core::Error::Io)?;
                if report.aborted {
                    return Err(CommandError::Arity(format!("script {file} stopped after an error")));
                }
                Ok(Outcome::new(
                    json!({"statements": report.statements, "errors": report.errors}),
                    "",
                ))
            }
            "help" => {
                let p = p(&["command"])?;
                match p.opt_text("command")? {
                    None => {
                        let names: Vec<&str> = COMMANDS.iter().map(|c| c.0).collect();
                        Ok(Outcome::new(json!(names), format!("Commands: {}", names.join(", "))))
                    }
                    Some(name) => {
                        let usage = COMMANDS
                            .iter()
                            .find(|c| c.0 == name.to_ascii_lowercase())
                            .ok_or(CommandError::UnknownCommand(name))?
                            .1;
                        Ok(Outcome::new(json!(usage), usage))
                    }
                }
            }
            "quit" | "exit" => {
                p(&[])?;
                self.quit = true;
                Ok(Outcome::done(""))
            }
            _ => Err(CommandError::UnknownCommand(command)),
        }
    }

    fn object_name(p: &Params, param: &str) -> Result<String, CommandError> {
        match p.required(param)? {
            Value::Bare(s) | Value::Str(s) => Ok(s.clone()),
            other => Err(CommandError::Type(format!("argument '{param}' must name an object, got {other}"))),
        }
    }

    fn network(&self, p: &Params) -> Result<&Network, CommandError> {
        let name = Self::object_name(p, "network")?;
        match self.objects.get(&name) {
            Some(Object::Network(net)) => {
                net.nodeset()?;
                Ok(net)
            }
            Some(_) => Err(CommandError::Type(format!("'{name}' is not a network"))),
            None => Err(CommandError::UnknownObject(name)),
        }
    }

    fn network_mut(&mut self, p: &Params) -> Result<&mut Network, CommandError> {
        let name = Self::object_name(p, "network")?;
        match self.objects.get_mut(&name) {
            Some(Object::Network(net)) => {
                net.nodeset()?;
                Ok(net)
            }
            Some(_) => Err(CommandError::Type(format!("'{name}' is not a network"))),
            None => Err(CommandError::UnknownObject(name)),
        }
    }

    /// A nodeset argument may also name a network, meaning its nodeset.
    fn nodeset_of(&self, p: &Params) -> Result<SharedNodeset, CommandError> {
        let name = Self::object_name(p, "nodeset")?;
        match self.objects.get(&name) {
            Some(Object::Nodeset(ns)) => Ok(ns.clone()),
            Some(Object::Network(net)) => Ok(net.nodeset()?),
            None => Err(CommandError::UnknownObject(name)),
        }
    }

    fn bind(&mut self, name: String, object: Object) {
        self.objects.insert(name, object);
    }

    fn create_nodeset(&mut self, target: String, p: Params) -> CmdResult {
        let n = p.opt_u64("createnodes")?.unwrap_or(0);
        let ns = Nodeset::with_count(n)?;
        self.bind(target.clone(), Object::Nodeset(ns.into_shared()));
        Ok(Outcome::new(
            json!({"name": target, "type": "nodeset", "nodes": n}),
            format!("Created nodeset '{target}' with {n} nodes"),
        ))
    }

    fn create_network(&mut self, target: String, p: Params) -> CmdResult {
        let ns_name = Self::object_name(&p, "nodeset")?;
        let ns = match self.objects.get(&ns_name) {
            Some(Object::Nodeset(ns)) => ns.clone(),
            Some(_) => return Err(CommandError::Type(format!("'{ns_name}' is not a nodeset"))),
            None => return Err(CommandError::UnknownObject(ns_name)),
        };
        self.bind(target.clone(), Object::Network(Network::new(&ns)));
        Ok(Outcome::new(
            json!({"name": target, "type": "network", "nodeset": ns_name}),
            format!("Created network '{target}' on nodeset '{ns_name}'"),
        ))
    }

    fn load_file(&mut self, target: String, p: Params) -> CmdResult {
        let file = p.text("file")?;
        let path = self.path(&file);
        let kind = match p.opt_text("type")?.map(|t| t.to_ascii_lowercase()).as_deref() {
            None | Some("auto") => wio::detect_kind(&path)?,
            Some("nodeset") => ObjectKind::Nodeset,
            Some("network") => ObjectKind::Network,
            Some(other) => {
                return Err(CommandError::Type(format!("type must be auto, nodeset or network, got '{other}'")))
            }
        };
        match kind {
            ObjectKind::Nodeset => {
                let ns = wio::load_nodeset(&path)?;
                let n = ns.len();
                self.bind(target.clone(), Object::Nodeset(ns.into_shared()));
                Ok(Outcome::new(
                    json!({"name": target, "type": "nodeset", "nodes": n}),
                    format!("Loaded nodeset '{target}' with {n} nodes"),
                ))
            }
            ObjectKind::Network => {
                if !p.has("nodeset") {
                    return Err(CommandError::Arity("loadfile: loading a network needs nodeset = <name>".into()));
                }
                let ns = self.nodeset_of(&p)?;
                let missing = if p.bool_or("autocreate", false)? {
                    MissingNodes::Create
                } else {
                    MissingNodes::Reject
                };
                let net = wio::load_network(&path, &ns, missing)?;
                let layers = net.layer_count();
                self.bind(target.clone(), Object::Network(net));
                Ok(Outcome::new(
                    json!({"name": target, "type": "network", "layers": layers}),
                    format!("Loaded network '{target}' with {layers} layers"),
                ))
            }
        }
    }

    fn add_layer(&mut self, p: Params) -> CmdResult {
        let name = p.text("layername")?;
        let mode = match p.opt_u64("mode")?.unwrap_or(1) {
            1 => LayerMode::OneMode,
            2 => LayerMode::TwoMode,
            m => return Err(CommandError::Type(format!("mode must be 1 or 2, got {m}"))),
        };
        let spec = match mode {
            LayerMode::OneMode => LayerSpec::one_mode(name.clone())
                .directed(p.bool_or("directed", false)?)
                .valued(p.bool_or("valued", false)?)
                .self_ties(p.bool_or("selfties", false)?)
                .store_inbound(p.bool_or("inbound", true)?),
            LayerMode::TwoMode => {
                for flag in ["directed", "valued", "selfties", "inbound"] {
                    if p.has(flag) {
                        return Err(CommandError::Arity(format!("addlayer: '{flag}' does not apply to two-mode layers")));
                    }
                }
                LayerSpec::two_mode(name.clone())
            }
        };
        self.network_mut(&p)?.add_layer(spec)?;
        Ok(Outcome::done(format!("Added layer '{name}'")))
    }

    fn generate(&mut self, p: Params) -> CmdResult {
        let layer = p.text("layername")?;
        let kind = p.text("type")?.to_ascii_lowercase();
        let params = match kind.as_str() {
            "er" | "erdosrenyi" => GeneratorParams::ErdosRenyi { p: p.f64("p")? },
            "ws" | "wattsstrogatz" => GeneratorParams::WattsStrogatz {
                k: p.u64("k")?,
                beta: p.f64("beta")?,
            },
            "ba" | "barabasialbert" => GeneratorParams::BarabasiAlbert { m: p.u64("m")? },
            "2mode" | "twomode" => GeneratorParams::TwoMode {
                h: p.u64("h")?,
                a: p.f64("a")?,
            },
            other => {
                return Err(CommandError::Type(format!("generator type must be er, ws, ba or 2mode, got '{other}'")))
            }
        };
        let seed = match p.opt_u64("seed")? {
            Some(s) => s,
            None => SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_nanos() as u64)
                .unwrap_or(0),
        };
        let report = generators::generate(self.network_mut(&p)?, &layer, params, Seed(seed))?;
        let mut result = json!({"layer": layer, "type": kind, "seed": seed});
        let text = if let GeneratorParams::TwoMode { .. } = params {
            result["hyperedges"] = json!(report.hyperedges);
            result["memberships"] = json!(report.ties);
            format!(
                "Generated {} hyperedges with {} memberships in '{layer}' (seed {seed})",
                report.hyperedges, report.ties
            )
        } else {
            result["edges"] = json!(report.ties);
            if let GeneratorParams::WattsStrogatz { .. } = params {
                result["rewired"] = json!(report.rewired);
            }
            format!("Generated {} edges in '{layer}' (seed {seed})", report.ties)
        };
        Ok(Outcome::new(result, text))
    }

    fn set_attribute(&mut self, p: Params) -> CmdResult {
        let (node, name) = (p.node("node")?, p.text("attribute")?);
        let ns = self.nodeset_of(&p)?;
        let declared = match p.opt_text("type")? {
            Some(t) => Some(
                AttributeKind::parse(&t.to_ascii_lowercase())
                    .ok_or_else(|| CommandError::Type(format!("type must be int, float, bool or char, got '{t}'")))?,
            ),
            None => read_lock(&ns).attribute_kind(&name),
        };
        let raw = p.required("value")?;
        let bad = || CommandError::Type(format!("setattribute: cannot store {raw} in attribute '{name}'"));
        let single_char = |s: &str| {
            let mut chars = s.chars();
            chars.next().filter(|_| chars.next().is_none())
        };
        let value = match (declared, raw) {
            (None | Some(AttributeKind::Bool), Value::Bool(b)) => AttributeValue::Bool(*b),
            (None, Value::Number(s)) if !s.contains(['.', 'e', 'E']) => AttributeValue::Int(p.i32("value")?),
            (None | Some(AttributeKind::Float), Value::Number(_)) => AttributeValue::Float(p.f32("value")?),
            (Some(AttributeKind::Int), Value::Number(_)) => AttributeValue::Int(p.i32("value")?),
            (None | Some(AttributeKind::Char), Value::Str(s) | Value::Bare(s)) => {
                AttributeValue::Char(single_char(s).ok_or_else(bad)?)
            }
            (Some(AttributeKind::Char), Value::Number(s)) => AttributeValue::Char(single_char(s).ok_or_else(bad)?),
            _ => return Err(bad()),
        };
        write_lock(&ns).set_attribute(node, &name, value)?;
        Ok(Outcome::done(""))
    }

    fn info(&self, p: Params) -> CmdResult {
        let name = Self::object_name(&p, "object")?;
        match self.objects.get(&name).ok_or(CommandError::UnknownObject(name.clone()))? {
            Object::Nodeset(ns) => {
                let ns = read_lock(ns);
                let attrs: Vec<Json> = ns
                    .schema()
                    .iter()
                    .map(|d| json!({"name": d.name, "type": d.kind.as_str()}))
                    .collect();
                let text = format!(
                    "Nodeset '{name}': {} nodes ({} with attributes), {} attribute names",
                    ns.len(),
                    ns.attributed_len(),
                    attrs.len()
                );
                Ok(Outcome::new(
                    json!({"name": name, "type": "nodeset", "nodes": ns.len(), "attributed": ns.attributed_len(), "attributes": attrs}),
                    text,
                ))
            }
            Object::Network(net) => {
                let ns = net.nodeset()?;
                let ns_name = self.objects.iter().find_map(|(n, o)| match o {
                    Object::Nodeset(s) if std::sync::Arc::ptr_eq(s, &ns) => Some(n.clone()),
                    _ => None,
                });
                let layers: Vec<Json> = net.layers().map(layer_json).collect();
                let mut text = format!("Network '{name}' on nodeset '{}', {} layers", ns_name.as_deref().unwrap_or("?"), layers.len());
                for layer in net.layers() {
                    text += "\n";
                    text += &layer_text(layer);
                }
                Ok(Outcome::new(
                    json!({"name": name, "type": "network", "nodeset": ns_name, "nodes": read_lock(&ns).len(), "layers": layers}),
                    text,
                ))
            }
        }
    }
}

fn summary_outcome(name: &str, summary: &AttributeSummary) -> Outcome {
    match summary {
        AttributeSummary::Numeric {
            kind,
            count,
            min,
            max,
            mean,
        } => Outcome::new(
            json!({"type": kind.as_str(), "count": count, "min": min.map(f64_json), "max": max.map(f64_json), "mean": mean.map(f64_json)}),
            match (min, max, mean) {
                (Some(lo), Some(hi), Some(mu)) => format!("{name} ({kind}): {count} values, min {lo}, max {hi}, mean {mu}"),
                _ => format!("{name} ({kind}): no values"),
            },
        ),
        AttributeSummary::Bool { count, true_count } => Outcome::new(
            json!({"type": "bool", "count": count, "true": true_count, "false": count - true_count}),
            format!("{name} (bool): {count} values, {true_count} true"),
        ),
        AttributeSummary::Char { count, frequencies } => {
            let freq: serde_json::Map<String, Json> =
                frequencies.iter().map(|(c, n)| (c.to_string(), json!(n))).collect();
            let listed: Vec<String> = frequencies.iter().map(|(c, n)| format!("{c:?}: {n}")).collect();
            Outcome::new(
                json!({"type": "char", "count": count, "frequencies": freq}),
                format!("{name} (char): {count} values; {}", listed.join(", ")),
            )
        }
    }
}
