use std::fmt::Write as _;

use thiserror::Error;

use super::ProofNode;
use crate::syntax::{is_constant_name, parse_formula, parse_sequent, ParseError, RuleName, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProofFormatError {
    #[error("at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("Cut is not a rule of ST∼")]
    Cut,
    #[error("in `{text}`: {source}")]
    Formula { text: String, source: ParseError },
    #[error("`{0}` is not a constant")]
    Term(String),
}

fn quote(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
}

fn write_node(out: &mut String, node: &ProofNode, indent: usize) {
    out.push_str("(rule ");
    quote(out, node.rule.as_str());
    out.push_str(" (conclusion ");
    quote(out, &node.conclusion.to_string());
    out.push(')');
    if let Some(p) = &node.principal {
        out.push_str(" (principal ");
        quote(out, &p.to_string());
        out.push(')');
    }
    if let Some(t) = &node.term {
        out.push_str(" (term ");
        quote(out, t.name());
        out.push(')');
    }
    for premise in &node.premises {
        let _ = write!(out, "\n{:width$}(premise ", "", width = indent + 2);
        write_node(out, premise, indent + 2);
        out.push(')');
    }
    out.push(')');
}

/// Renders a proof in the canonical text format, one premise per line.
pub fn print_proof(node: &ProofNode) -> String {
    let mut out = String::new();
    write_node(&mut out, node, 0);
    out
}

#[derive(Debug, PartialEq)]
enum Token {
    Open,
    Close,
    Symbol(String),
    Str(String),
}

fn syntax(offset: usize, message: impl Into<String>) -> ProofFormatError {
    ProofFormatError::Syntax {
        offset,
        message: message.into(),
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ProofFormatError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        match c {
            '(' => out.push((i, Token::Open)),
            ')' => out.push((i, Token::Close)),
            '"' => {
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some((_, '"')) => break,
                        Some((_, '\\')) => match chars.next() {
                            Some((_, e @ ('"' | '\\'))) => s.push(e),
                            Some((j, e)) => return Err(syntax(j, format!("bad escape `\\{e}`"))),
                            None => return Err(syntax(text.len(), "unterminated string")),
                        },
                        Some((_, c)) => s.push(c),
                        None => return Err(syntax(text.len(), "unterminated string")),
                    }
                }
                out.push((i, Token::Str(s)));
            }
            c if c.is_whitespace() => {}
            c if c.is_ascii_alphabetic() => {
                let mut s = String::from(c);
                while let Some(&(_, d)) = chars.peek() {
                    if !d.is_ascii_alphanumeric() && d != '_' {
                        break;
                    }
                    s.push(d);
                    chars.next();
                }
                out.push((i, Token::Symbol(s)));
            }
            c => return Err(syntax(i, format!("unexpected `{c}`"))),
        }
    }
    Ok(out)
}

struct Reader {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Reader {
    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn next(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos).map(|t| &t.1);
        self.pos += 1;
        t
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|t| &t.1)
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ProofFormatError> {
        let at = self.offset();
        match self.next() {
            Some(t) if *t == want => Ok(()),
            _ => Err(syntax(at, format!("expected {what}"))),
        }
    }

    fn string(&mut self) -> Result<String, ProofFormatError> {
        let at = self.offset();
        match self.next() {
            Some(Token::Str(s)) => Ok(s.clone()),
            _ => Err(syntax(at, "expected a quoted string")),
        }
    }

    /// `(key "value")` with a known key.
    fn field(&mut self, key: &str) -> Result<String, ProofFormatError> {
        self.expect(Token::Open, "`(`")?;
        self.expect(Token::Symbol(key.into()), &format!("`{key}`"))?;
        let s = self.string()?;
        self.expect(Token::Close, "`)`")?;
        Ok(s)
    }

    fn peek_key(&self) -> Option<&str> {
        match (self.peek(), self.tokens.get(self.pos + 1).map(|t| &t.1)) {
            (Some(Token::Open), Some(Token::Symbol(s))) => Some(s),
            _ => None,
        }
    }

    fn node(&mut self) -> Result<ProofNode, ProofFormatError> {
        self.expect(Token::Open, "`(`")?;
        self.expect(Token::Symbol("rule".into()), "`rule`")?;
        let name = self.string()?;
        let rule = match RuleName::from_name(&name) {
            Some(r) => r,
            None if name == "Cut" => return Err(ProofFormatError::Cut),
            None => return Err(ProofFormatError::UnknownRule(name)),
        };
        let text = self.field("conclusion")?;
        let conclusion = parse_sequent(&text).map_err(|source| ProofFormatError::Formula { text, source })?;
        let mut node = ProofNode::leaf(conclusion, rule);
        if self.peek_key() == Some("principal") {
            let text = self.field("principal")?;
            node.principal =
                Some(parse_formula(&text).map_err(|source| ProofFormatError::Formula { text, source })?);
        }
        if self.peek_key() == Some("term") {
            let name = self.field("term")?;
            if !is_constant_name(&name) {
                return Err(ProofFormatError::Term(name));
            }
            node.term = Some(Term::constant(name));
        }
        while self.peek_key() == Some("premise") {
            self.pos += 2;
            node.premises.push(self.node()?);
            self.expect(Token::Close, "`)`")?;
        }
        self.expect(Token::Close, "`)`")?;
        Ok(node)
    }
}

/// Reads a proof written by [`print_proof`]. Whitespace between tokens is
/// free; the rule arity is not checked here.
pub fn parse_proof(text: &str) -> Result<ProofNode, ProofFormatError> {
    let mut reader = Reader {
        tokens: tokenize(text)?,
        pos: 0,
        end: text.len(),
    };
    let node = reader.node()?;
    if reader.pos < reader.tokens.len() {
        return Err(syntax(reader.offset(), "trailing input"));
    }
    Ok(node)
}
