//! Script interpreter for weft networks.
//!
//! Statements look like `net = createnetwork(nodeset = nodes)`. Output is
//! either human-readable text or one JSON object per statement:
//! `{"status":"ok"|"error","command":...,"result":...,"error":...}`.

pub mod args;
pub mod error;
pub mod parser;
pub mod session;

pub use error::CommandError;
pub use parser::{parse_line, Statement, SyntaxError, Value};
pub use session::{Object, OutputMode, Response, ScriptReport, Session};
