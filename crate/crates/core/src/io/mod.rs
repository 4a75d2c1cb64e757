//! Saving and loading nodesets and networks.
//!
//! Four on-disk forms are supported, picked by file extension: `.tsv`,
//! `.tsv.gz`, `.bin` and `.bin.gz`. Output is canonical: node IDs ascending,
//! layers in insertion order, hyperedges by name. Saving the same object twice
//! gives identical bytes.

mod binary;
mod text;

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::error::{Error, Result};
use crate::model::{read_nodeset as read_nodeset_lock, write_nodeset as write_nodeset_lock, Network, NodeId, Nodeset, SharedNodeset};

pub use binary::{BINARY_MAGIC, BINARY_VERSION};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Tsv,
    TsvGz,
    Bin,
    BinGz,
}

impl FileFormat {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let name = path
            .file_name()
            .and_then(|n| n.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        if name.ends_with(".tsv.gz") {
            Ok(FileFormat::TsvGz)
        } else if name.ends_with(".bin.gz") {
            Ok(FileFormat::BinGz)
        } else if name.ends_with(".tsv") {
            Ok(FileFormat::Tsv)
        } else if name.ends_with(".bin") {
            Ok(FileFormat::Bin)
        } else {
            Err(Error::UnknownFormat(path.to_path_buf()))
        }
    }

    pub fn is_binary(&self) -> bool {
        matches!(self, FileFormat::Bin | FileFormat::BinGz)
    }

    pub fn is_compressed(&self) -> bool {
        matches!(self, FileFormat::TsvGz | FileFormat::BinGz)
    }
}

/// What a saved file contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectKind {
    Nodeset,
    Network,
}

/// What to do with node IDs in a network file that the nodeset lacks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingNodes {
    #[default]
    Reject,
    /// Add them to the nodeset as plain nodes.
    Create,
}

/// Output file, buffered ahead of the compressor so small writes stay cheap.
enum Sink {
    Plain(BufWriter<File>),
    Gz(BufWriter<GzEncoder<File>>),
}

impl Write for Sink {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        match self {
            Sink::Plain(w) => w.write(buf),
            Sink::Gz(w) => w.write(buf),
        }
    }

    fn write_all(&mut self, buf: &[u8]) -> std::io::Result<()> {
        match self {
            Sink::Plain(w) => w.write_all(buf),
            Sink::Gz(w) => w.write_all(buf),
        }
    }

    fn flush(&mut self) -> std::io::Result<()> {
        match self {
            Sink::Plain(w) => w.flush(),
            Sink::Gz(w) => w.flush(),
        }
    }
}

fn create(path: &Path, format: FileFormat) -> Result<Sink> {
    let file = File::create(path)?;
    Ok(if format.is_compressed() {
        Sink::Gz(BufWriter::with_capacity(1 << 16, GzEncoder::new(file, Compression::fast())))
    } else {
        Sink::Plain(BufWriter::new(file))
    })
}

fn open(path: &Path, format: FileFormat) -> Result<Box<dyn BufRead>> {
    let file = BufReader::new(File::open(path)?);
    Ok(if format.is_compressed() {
        Box::new(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        Box::new(file)
    })
}

/// Flushes and, for gzip, writes the trailer so errors are not lost on drop.
fn finish(w: Sink) -> Result<()> {
    match w {
        Sink::Plain(mut w) => w.flush()?,
        Sink::Gz(w) => {
            let encoder = w.into_inner().map_err(|e| e.into_error())?;
            encoder.finish()?.flush()?;
        }
    }
    Ok(())
}

pub fn write_nodeset<W: Write>(ns: &Nodeset, out: &mut W, binary: bool) -> Result<()> {
    if binary {
        binary::write_nodeset(ns, out)
    } else {
        text::write_nodeset(ns, out)
    }
}

pub fn read_nodeset<R: BufRead>(input: R, binary: bool) -> Result<Nodeset> {
    if binary {
        binary::read_nodeset(input)
    } else {
        text::read_nodeset(input)
    }
}

pub fn write_network<W: Write>(net: &Network, out: &mut W, binary: bool) -> Result<()> {
    if binary {
        binary::write_network(net, out)
    } else {
        text::write_network(net, out)
    }
}

/// Reads a network onto `ns`. With [`MissingNodes::Create`], unknown node IDs
/// are added to `ns` once the whole input has parsed.
pub fn read_network<R: BufRead>(input: R, binary: bool, ns: &SharedNodeset, missing: MissingNodes) -> Result<Network> {
    let mut resolver = NodeResolver::new(missing);
    let net = if binary {
        binary::read_network(input, ns, &mut resolver)?
    } else {
        text::read_network(input, ns, &mut resolver)?
    };
    resolver.commit(ns)?;
    Ok(net)
}

pub fn save_nodeset(ns: &Nodeset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let format = FileFormat::from_path(path)?;
    let mut w = create(path, format)?;
    write_nodeset(ns, &mut w, format.is_binary())?;
    finish(w)
}

pub fn load_nodeset(path: impl AsRef<Path>) -> Result<Nodeset> {
    let path = path.as_ref();
    let format = FileFormat::from_path(path)?;
    read_nodeset(open(path, format)?, format.is_binary())
}

pub fn save_network(net: &Network, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let format = FileFormat::from_path(path)?;
    let mut w = create(path, format)?;
    write_network(net, &mut w, format.is_binary())?;
    finish(w)
}

pub fn load_network(path: impl AsRef<Path>, ns: &SharedNodeset, missing: MissingNodes) -> Result<Network> {
    let path = path.as_ref();
    let format = FileFormat::from_path(path)?;
    read_network(open(path, format)?, format.is_binary(), ns, missing)
}

/// Guesses whether a file holds a nodeset or a network. Text files are
/// nodesets when they start with the `nodeid` header; an empty text file is an
/// empty network.
pub fn detect_kind(path: impl AsRef<Path>) -> Result<ObjectKind> {
    let path = path.as_ref();
    let format = FileFormat::from_path(path)?;
    let mut input = open(path, format)?;
    if format.is_binary() {
        binary::read_kind(&mut input)
    } else {
        let mut first = String::new();
        input.read_line(&mut first)?;
        let head = first.split(['\t', '\n', '\r']).next().unwrap_or("");
        Ok(if head == "nodeid" {
            ObjectKind::Nodeset
        } else {
            ObjectKind::Network
        })
    }
}

/// Writes one layer as an edge list (one-mode) or membership list (two-mode).
pub fn export_layer(net: &Network, layer: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let format = layer_format(path)?;
    let layer = net.layer(layer)?;
    let mut w = create(path, format)?;
    text::write_layer_body(layer, &mut w)?;
    finish(w)
}

/// Reads an edge or membership list into an existing, empty layer.
pub fn import_layer(net: &mut Network, layer: &str, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let format = layer_format(path)?;
    let ns = net.nodeset()?;
    if !net.layer(layer)?.is_empty() {
        return Err(Error::NonEmptyLayer(layer.to_string()));
    }
    let mut resolver = NodeResolver::new(MissingNodes::Reject);
    let input = open(path, format)?;
    let mut staged = net.layer(layer)?.clone();
    text::read_layer_body(input, &mut staged, &read_nodeset_lock(&ns), &mut resolver)?;
    *net.layer_mut(layer)? = staged;
    Ok(())
}

fn layer_format(path: &Path) -> Result<FileFormat> {
    let format = FileFormat::from_path(path)?;
    if format.is_binary() {
        return Err(Error::InvalidParameter(
            "layer export and import use .tsv or .tsv.gz files".into(),
        ));
    }
    Ok(format)
}

/// Checks node IDs against a nodeset, optionally collecting unknown ones for
/// later creation.
pub(crate) struct NodeResolver {
    missing: MissingNodes,
    pending: std::collections::HashSet<NodeId>,
}

impl NodeResolver {
    fn new(missing: MissingNodes) -> Self {
        Self {
            missing,
            pending: Default::default(),
        }
    }

    pub(crate) fn check(&mut self, ns: &Nodeset, node: NodeId, line: usize) -> Result<()> {
        if ns.contains(node) || self.pending.contains(&node) {
            return Ok(());
        }
        match self.missing {
            MissingNodes::Reject => Err(Error::UnknownNodeInEdge { line, node }),
            MissingNodes::Create => {
                self.pending.insert(node);
                Ok(())
            }
        }
    }

    fn commit(self, ns: &SharedNodeset) -> Result<()> {
        if self.pending.is_empty() {
            return Ok(());
        }
        let mut pending: Vec<NodeId> = self.pending.into_iter().collect();
        pending.sort_unstable();
        let mut ns = write_nodeset_lock(ns);
        for node in pending {
            ns.add_node(node)?;
        }
        Ok(())
    }
}
