//! Binding statement arguments to command parameters and converting literals.

use std::collections::HashMap;

use weft_core::model::NodeId;

use crate::error::CommandError;
use crate::parser::{Arg, Value};

/// Alternative spellings accepted for named arguments.
const ALIASES: &[(&str, &str)] = &[
    ("layername", "layernames"),
    ("layernames", "layername"),
    ("layer", "layername"),
    ("layers", "layernames"),
    ("object", "nodeset"),
    ("object", "network"),
    ("network", "net"),
    ("file", "path"),
    ("direction", "traversal"),
    ("node", "nodeid"),
];

fn canonical<'s>(params: &[&'s str], name: &str) -> Option<&'s str> {
    let name = name.to_ascii_lowercase();
    params.iter().copied().find(|p| *p == name).or_else(|| {
        ALIASES
            .iter()
            .filter(|(_, alias)| *alias == name)
            .find_map(|(target, _)| params.iter().copied().find(|p| p == target))
    })
}

/// Arguments of one statement, keyed by parameter name.
#[derive(Debug)]
pub struct Params {
    command: String,
    values: HashMap<&'static str, Value>,
}

impl Params {
    /// Positional arguments fill `params` in order; named ones go by name.
    pub fn bind(command: &str, args: Vec<Arg>, params: &[&'static str]) -> Result<Self, CommandError> {
        let mut values = HashMap::new();
        let mut next = 0;
        let mut seen_named = false;
        for arg in args {
            let slot = match &arg.name {
                Some(name) => {
                    seen_named = true;
                    canonical(params, name).ok_or_else(|| {
                        CommandError::Arity(format!("{command}: unknown argument '{name}'"))
                    })?
                }
                None => {
                    if seen_named {
                        return Err(CommandError::Arity(format!(
                            "{command}: positional argument after named arguments"
                        )));
                    }
                    let slot = *params.get(next).ok_or_else(|| {
                        CommandError::Arity(format!("{command}: takes at most {} arguments", params.len()))
                    })?;
                    next += 1;
                    slot
                }
            };
            if values.insert(slot, arg.value).is_some() {
                return Err(CommandError::Arity(format!("{command}: argument '{slot}' given twice")));
            }
        }
        Ok(Self {
            command: command.to_string(),
            values,
        })
    }

    pub fn has(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    pub fn raw(&self, name: &str) -> Option<&Value> {
        self.values.get(name)
    }

    pub fn required(&self, name: &str) -> Result<&Value, CommandError> {
        self.raw(name)
            .ok_or_else(|| CommandError::Arity(format!("{}: missing argument '{name}'", self.command)))
    }

    fn type_error(&self, name: &str, value: &Value, wanted: &str) -> CommandError {
        CommandError::Type(format!("{}: argument '{name}' must be {wanted}, got {value}", self.command))
    }

    pub fn text(&self, name: &str) -> Result<String, CommandError> {
        let v = self.required(name)?;
        v.as_text().map(str::to_string).ok_or_else(|| self.type_error(name, v, "a string"))
    }

    pub fn opt_text(&self, name: &str) -> Result<Option<String>, CommandError> {
        self.raw(name).map(|_| self.text(name)).transpose()
    }

    /// A single string or a `;` list of them.
    pub fn texts(&self, name: &str) -> Result<Option<Vec<String>>, CommandError> {
        let Some(v) = self.raw(name) else { return Ok(None) };
        let items: Vec<&Value> = match v {
            Value::List(items) => items.iter().collect(),
            other => vec![other],
        };
        items
            .into_iter()
            .map(|item| item.as_text().map(str::to_string).ok_or_else(|| self.type_error(name, item, "a string")))
            .collect::<Result<_, _>>()
            .map(Some)
    }

    fn number<'v>(&self, name: &str, v: &'v Value, wanted: &str) -> Result<&'v str, CommandError> {
        match v {
            Value::Number(s) => Ok(s),
            other => Err(self.type_error(name, other, wanted)),
        }
    }

    fn integer<T: std::str::FromStr>(&self, name: &str, v: &Value, wanted: &str) -> Result<T, CommandError> {
        let s = self.number(name, v, wanted)?;
        s.parse::<T>().map_err(|_| self.type_error(name, v, wanted))
    }

    pub fn node(&self, name: &str) -> Result<NodeId, CommandError> {
        let v = self.required(name)?;
        self.integer(name, v, "a node ID (0 to 4294967295)")
    }

    pub fn nodes(&self, name: &str) -> Result<Vec<NodeId>, CommandError> {
        match self.raw(name) {
            None => Ok(Vec::new()),
            Some(Value::List(items)) => items
                .iter()
                .map(|v| self.integer(name, v, "a list of node IDs"))
                .collect(),
            Some(v) => Ok(vec![self.integer(name, v, "a node ID (0 to 4294967295)")?]),
        }
    }

    pub fn u64(&self, name: &str) -> Result<u64, CommandError> {
        let v = self.required(name)?;
        self.integer(name, v, "a non-negative integer")
    }

    pub fn opt_u64(&self, name: &str) -> Result<Option<u64>, CommandError> {
        self.raw(name).map(|_| self.u64(name)).transpose()
    }

    pub fn i32(&self, name: &str) -> Result<i32, CommandError> {
        let v = self.required(name)?;
        self.integer(name, v, "a 32-bit integer")
    }

    pub fn f64(&self, name: &str) -> Result<f64, CommandError> {
        let v = self.required(name)?;
        let s = self.number(name, v, "a number")?;
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| self.type_error(name, v, "a finite number"))
    }

    pub fn opt_f64(&self, name: &str) -> Result<Option<f64>, CommandError> {
        self.raw(name).map(|_| self.f64(name)).transpose()
    }

    /// Values that do not fit in an f32 are rejected rather than rounded to
    /// infinity.
    pub fn f32(&self, name: &str) -> Result<f32, CommandError> {
        let x = self.f64(name)?;
        let y = x as f32;
        if y.is_finite() {
            Ok(y)
        } else {
            Err(self.type_error(name, self.required(name)?, "a number within 32-bit float range"))
        }
    }

    pub fn opt_f32(&self, name: &str) -> Result<Option<f32>, CommandError> {
        self.raw(name).map(|_| self.f32(name)).transpose()
    }

    pub fn opt_bool(&self, name: &str) -> Result<Option<bool>, CommandError> {
        match self.raw(name) {
            None => Ok(None),
            Some(Value::Bool(b)) => Ok(Some(*b)),
            Some(Value::Number(s)) if s == "0" || s == "1" => Ok(Some(s == "1")),
            Some(v) => Err(self.type_error(name, v, "true or false")),
        }
    }

    pub fn bool_or(&self, name: &str, default: bool) -> Result<bool, CommandError> {
        Ok(self.opt_bool(name)?.unwrap_or(default))
    }
}
