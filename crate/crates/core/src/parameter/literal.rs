use thiserror::Error;

use super::{BoundarySet, Parameter, PresetError};
use crate::semantics::{TruthValue, ValueError, ValueSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParameterParseError {
    #[error("at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("missing {0}= component")]
    Missing(char),
    #[error("{0}= given twice")]
    Duplicate(char),
    #[error("V must be [0,1] or a finite set")]
    BadValueSpace,
    #[error(transparent)]
    Value(#[from] ValueError),
    #[error(transparent)]
    Preset(#[from] PresetError),
}

fn syntax(offset: usize, message: impl Into<String>) -> ParameterParseError {
    ParameterParseError::Syntax {
        offset,
        message: message.into(),
    }
}

enum Literal {
    Set(Vec<TruthValue>),
    Interval {
        lo: TruthValue,
        lo_open: bool,
        hi: TruthValue,
        hi_open: bool,
    },
}

fn parse_values(text: &str) -> Result<Vec<TruthValue>, ValueError> {
    let text = text.trim();
    if text.is_empty() {
        return Ok(vec![]);
    }
    text.split(',').map(str::parse).collect()
}

fn parse_literal(text: &str, offset: usize) -> Result<Literal, ParameterParseError> {
    let open = text.chars().next().unwrap_or(' ');
    let close = text.chars().last().unwrap_or(' ');
    let inner = &text[1..text.len() - 1];
    match (open, close) {
        ('{', '}') => Ok(Literal::Set(parse_values(inner)?)),
        ('[' | '(', ']' | ')') => {
            let values = parse_values(inner)?;
            if values.len() != 2 {
                return Err(syntax(offset, "an interval needs two endpoints"));
            }
            Ok(Literal::Interval {
                lo: values[0],
                lo_open: open == '(',
                hi: values[1],
                hi_open: close == ')',
            })
        }
        _ => Err(syntax(offset, format!("expected a set or interval, found `{text}`"))),
    }
}

fn boundary(lit: Literal) -> BoundarySet {
    match lit {
        Literal::Set(vs) => BoundarySet::explicit(vs),
        Literal::Interval {
            lo,
            lo_open,
            hi,
            hi_open,
        } => BoundarySet::Interval {
            lo,
            lo_open,
            hi,
            hi_open,
        },
    }
}

/// Parses `V=[0,1] T=(1/2,1] F=[0,1/2)`, `V={0,1/2,1} T={1} F={0}`, or a
/// preset name. The result is not validated.
pub fn parse_parameter(text: &str) -> Result<Parameter, ParameterParseError> {
    let trimmed = text.trim();
    if !trimmed.contains('=') {
        return Ok(Parameter::preset(trimmed)?);
    }
    let bytes = text.as_bytes();
    let mut parts: [Option<Literal>; 3] = [None, None, None];
    let mut i = 0;
    loop {
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if i == bytes.len() {
            break;
        }
        let key = bytes[i] as char;
        let slot = match key {
            'V' => 0,
            'T' => 1,
            'F' => 2,
            _ => return Err(syntax(i, format!("expected V=, T= or F=, found `{key}`"))),
        };
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        if bytes.get(i) != Some(&b'=') {
            return Err(syntax(i, "expected `=`"));
        }
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
            i += 1;
        }
        let start = i;
        let closer = match bytes.get(i) {
            Some(b'{') => &b"}"[..],
            Some(b'[' | b'(') => &b"])"[..],
            _ => return Err(syntax(i, "expected `{`, `[` or `(`")),
        };
        while i < bytes.len() && !closer.contains(&bytes[i]) {
            i += 1;
        }
        if i == bytes.len() {
            return Err(syntax(i, "unterminated literal"));
        }
        i += 1;
        let literal = parse_literal(&text[start..i], start)?;
        if parts[slot].replace(literal).is_some() {
            return Err(ParameterParseError::Duplicate(key));
        }
    }
    let [v, t, f] = parts;
    let v = match v.ok_or(ParameterParseError::Missing('V'))? {
        Literal::Set(vs) => ValueSet::finite(vs),
        Literal::Interval {
            lo,
            lo_open: false,
            hi,
            hi_open: false,
        } if lo == TruthValue::ZERO && hi == TruthValue::ONE => ValueSet::UnitInterval,
        _ => return Err(ParameterParseError::BadValueSpace),
    };
    let t = boundary(t.ok_or(ParameterParseError::Missing('T'))?);
    let f = boundary(f.ok_or(ParameterParseError::Missing('F'))?);
    Ok(Parameter::new(v, t, f))
}
