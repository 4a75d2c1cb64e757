//! Statement grammar.
//!
//! ```text
//! stmt  := [ident "="] ident "(" [arg {"," arg}] ")"
//! arg   := [ident "="] value
//! value := scalar {";" scalar}
//! scalar:= number | true | false | quoted string | bare token
//! ```
//!
//! `#` starts a comment outside quotes. Bare tokens may start with a digit
//! (`type = 2mode`); anything that reads as a number is a number.

use std::fmt;

/// One literal as written.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    /// Numeric literal, kept as text so each command can pick the width.
    Number(String),
    Bool(bool),
    /// Quoted string.
    Str(String),
    /// Unquoted word: an object name or a string literal.
    Bare(String),
    List(Vec<Value>),
}

impl Value {
    /// Text of a string-like scalar.
    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Str(s) | Value::Bare(s) | Value::Number(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Number(s) | Value::Bare(s) => f.write_str(s),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Str(s) => write!(f, "{s:?}"),
            Value::List(items) => {
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        f.write_str(";")?;
                    }
                    write!(f, "{item}")?;
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arg {
    pub name: Option<String>,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Statement {
    pub target: Option<String>,
    pub command: String,
    pub args: Vec<Arg>,
}

/// `column` is 1-based and counts characters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub column: usize,
    pub message: String,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "syntax error at column {}: {}", self.column, self.message)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Word(String),
    Str(String),
    LParen,
    RParen,
    Comma,
    Semi,
    Eq,
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '.' | '-' | '+' | '/' | ':' | '\\' | '~')
}

fn tokenize(line: &str) -> Result<Vec<(usize, Token)>, SyntaxError> {
    let chars: Vec<char> = line.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            '#' => break,
            c if c.is_whitespace() => i += 1,
            '(' | ')' | ',' | ';' | '=' => {
                tokens.push((
                    col,
                    match c {
                        '(' => Token::LParen,
                        ')' => Token::RParen,
                        ',' => Token::Comma,
                        ';' => Token::Semi,
                        _ => Token::Eq,
                    },
                ));
                i += 1;
            }
            '"' | '\'' => {
                let quote = c;
                let mut s = String::new();
                i += 1;
                loop {
                    let Some(&d) = chars.get(i) else {
                        return Err(SyntaxError {
                            column: col,
                            message: "unterminated string".into(),
                        });
                    };
                    i += 1;
                    match d {
                        d if d == quote => break,
                        '\\' => {
                            let e = chars.get(i).copied().ok_or_else(|| SyntaxError {
                                column: col,
                                message: "unterminated string".into(),
                            })?;
                            i += 1;
                            s.push(match e {
                                'n' => '\n',
                                't' => '\t',
                                'r' => '\r',
                                other => other,
                            });
                        }
                        d => s.push(d),
                    }
                }
                tokens.push((col, Token::Str(s)));
            }
            c if is_word_char(c) => {
                let start = i;
                while i < chars.len() && is_word_char(chars[i]) {
                    i += 1;
                }
                tokens.push((col, Token::Word(chars[start..i].iter().collect())));
            }
            other => {
                return Err(SyntaxError {
                    column: col,
                    message: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(tokens)
}

fn is_identifier(word: &str) -> bool {
    let mut chars = word.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

fn looks_numeric(word: &str) -> bool {
    word.starts_with(|c: char| c.is_ascii_digit() || matches!(c, '-' | '+' | '.')) && word.parse::<f64>().is_ok()
}

fn scalar(word: String) -> Value {
    match word.as_str() {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ if looks_numeric(&word) => Value::Number(word),
        _ => Value::Bare(word),
    }
}

struct Cursor {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end_col: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }
    fn peek_at(&self, offset: usize) -> Option<&Token> {
        self.tokens.get(self.pos + offset).map(|t| &t.1)
    }
    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_col, |t| t.0)
    }
    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|t| t.1.clone());
        self.pos += 1;
        t
    }
    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        Err(SyntaxError {
            column: self.column(),
            message: message.into(),
        })
    }
    fn expect(&mut self, token: Token, what: &str) -> Result<(), SyntaxError> {
        if self.peek() == Some(&token) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }
    fn identifier(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Token::Word(w)) if is_identifier(w) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.error(format!("expected {what}")),
        }
    }
    fn scalar(&mut self) -> Result<Value, SyntaxError> {
        match self.peek() {
            Some(Token::Word(_)) | Some(Token::Str(_)) => {}
            _ => return self.error("expected a value"),
        }
        Ok(match self.next() {
            Some(Token::Word(w)) => scalar(w),
            Some(Token::Str(s)) => Value::Str(s),
            _ => unreachable!(),
        })
    }
    fn value(&mut self) -> Result<Value, SyntaxError> {
        let first = self.scalar()?;
        if self.peek() != Some(&Token::Semi) {
            return Ok(first);
        }
        let mut items = vec![first];
        while self.peek() == Some(&Token::Semi) {
            self.pos += 1;
            items.push(self.scalar()?);
        }
        Ok(Value::List(items))
    }
    fn arg(&mut self) -> Result<Arg, SyntaxError> {
        let named = matches!(self.peek(), Some(Token::Word(w)) if is_identifier(w)) && self.peek_at(1) == Some(&Token::Eq);
        let name = if named {
            let name = self.identifier("argument name")?;
            self.pos += 1;
            Some(name)
        } else {
            None
        };
        Ok(Arg {
            name,
            value: self.value()?,
        })
    }
}

/// Parses one line. Blank lines and comments give `Ok(None)`.
pub fn parse_line(line: &str) -> Result<Option<Statement>, SyntaxError> {
    let tokens = tokenize(line)?;
    if tokens.is_empty() {
        return Ok(None);
    }
    let mut c = Cursor {
        tokens,
        pos: 0,
        end_col: line.chars().count() + 1,
    };
    let first = c.identifier("a command name")?;
    let (target, command) = if c.peek() == Some(&Token::Eq) {
        c.pos += 1;
        (Some(first), c.identifier("a command name after '='")?)
    } else {
        (None, first)
    };
    c.expect(Token::LParen, "'('")?;
    let mut args = Vec::new();
    if c.peek() != Some(&Token::RParen) {
        loop {
            args.push(c.arg()?);
            match c.peek() {
                Some(Token::Comma) => c.pos += 1,
                Some(Token::RParen) => break,
                _ => return c.error("expected ',' or ')'"),
            }
        }
    }
    c.expect(Token::RParen, "')'")?;
    if c.peek().is_some() {
        return c.error("unexpected text after ')'");
    }
    Ok(Some(Statement {
        target,
        command: command.to_ascii_lowercase(),
        args,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(line: &str) -> Statement {
        parse_line(line).unwrap().unwrap()
    }

    fn err(line: &str) -> SyntaxError {
        parse_line(line).unwrap_err()
    }

    #[test]
    fn assignment_with_named_number() {
        let s = parse("nodes = createnodeset(createnodes = 20000000)");
        assert_eq!(s.target.as_deref(), Some("nodes"));
        assert_eq!(s.command, "createnodeset");
        assert_eq!(
            s.args,
            vec![Arg {
                name: Some("createnodes".into()),
                value: Value::Number("20000000".into())
            }]
        );
    }

    #[test]
    fn blank_and_comment_lines() {
        assert_eq!(parse_line("").unwrap(), None);
        assert_eq!(parse_line("   \t").unwrap(), None);
        assert_eq!(parse_line("# Create nodeset with 20 million nodes").unwrap(), None);
    }

    #[test]
    fn semicolon_lists() {
        let s = parse("getnodealters(net, 1000000, layernames = Workplaces;Communication)");
        assert_eq!(s.args.len(), 3);
        assert_eq!(s.args[0].value, Value::Bare("net".into()));
        assert_eq!(s.args[1].value, Value::Number("1000000".into()));
        assert_eq!(
            s.args[2].value,
            Value::List(vec![Value::Bare("Workplaces".into()), Value::Bare("Communication".into())])
        );
    }

    #[test]
    fn mixed_literals() {
        let s = parse(r#"generate(net, "Workplaces", type = 2mode, h = 10000, a = 20, flag = false, x = -1.5e3)"#);
        assert_eq!(s.args[1].value, Value::Str("Workplaces".into()));
        assert_eq!(s.args[2].value, Value::Bare("2mode".into()));
        assert_eq!(s.args[5].value, Value::Bool(false));
        assert_eq!(s.args[6].value, Value::Number("-1.5e3".into()));
        let s = parse(r#"savefile(net, file = "a \"b\".tsv")  # trailing comment"#);
        assert_eq!(s.args[1].value, Value::Str("a \"b\".tsv".into()));
        assert_eq!(parse("quit()").args, vec![]);
        assert_eq!(parse("  Help ( )  ").command, "help");
    }

    #[test]
    fn errors_report_columns() {
        assert_eq!(err("checkedge(net").column, 14);
        assert_eq!(err("checkedge net)").column, 11);
        assert_eq!(err("checkedge(net,)").column, 15);
        assert_eq!(err("x = (1)").column, 5);
        assert_eq!(err("f(1) g").column, 6);
        assert_eq!(err("f(\"open").column, 3);
        assert_eq!(err("f(a = )").column, 7);
        assert_eq!(err("f(a;)").column, 5);
        assert_eq!(err("f(@)").column, 3);
        assert_eq!(err("1x = f()").column, 1);
    }
}
