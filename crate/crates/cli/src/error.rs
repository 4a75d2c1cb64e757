use std::fmt;

use crate::parser::SyntaxError;

/// Everything a statement can fail with. None of these end the session.
#[derive(Debug)]
pub enum CommandError {
    Syntax(SyntaxError),
    UnknownCommand(String),
    Arity(String),
    Type(String),
    UnknownObject(String),
    Core(weft_core::Error),
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CommandError::Syntax(e) => e.fmt(f),
            CommandError::UnknownCommand(name) => write!(f, "unknown command '{name}' (try help())"),
            CommandError::Arity(msg) | CommandError::Type(msg) => f.write_str(msg),
            CommandError::UnknownObject(name) => write!(f, "no object named '{name}'"),
            CommandError::Core(e) => e.fmt(f),
        }
    }
}

impl std::error::Error for CommandError {}

impl From<weft_core::Error> for CommandError {
    fn from(e: weft_core::Error) -> Self {
        CommandError::Core(e)
    }
}

impl From<SyntaxError> for CommandError {
    fn from(e: SyntaxError) -> Self {
        CommandError::Syntax(e)
    }
}
