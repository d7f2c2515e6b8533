//! Recursive-descent parser for formulas and sequents.
//!
//! Precedence is `!` > `&` > `|` > `->`; `&` and `|` associate to the left,
//! `->` to the right, and a quantifier's scope extends as far right as
//! possible. A single uppercase letter immediately followed by a term name is
//! shorthand for a unary atom (`Pa` is `P(a)`, `t1~Pt2` is `t1 ~P t2`).

use std::collections::BTreeMap;

use thiserror::Error;

use super::{is_constant_name, is_predicate_name, is_variable_name, Atom, Formula, Sequent, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: expected {}, found {found}", expected.join(" or "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
        found: String,
    },
    #[error("predicate {name} used with arity {found} at offset {offset}, earlier with arity {expected}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
        offset: usize,
    },
    #[error("binder at offset {offset} must be a variable (u..z), found {name}")]
    BinderNotVariable { name: String, offset: usize },
    #[error("open formula: free variable(s) {}", vars.join(", "))]
    FreeVariables { vars: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    LParen,
    RParen,
    Comma,
    Bang,
    Amp,
    Bar,
    Arrow,
    Tilde,
    Dot,
    Turnstile,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Amp => "`&`".into(),
            Tok::Bar => "`|`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Tilde => "`~`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Turnstile => "`|-`".into(),
            Tok::End => "end of input".into(),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\r' | b'\n' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'!' => Tok::Bang,
            b'&' => Tok::Amp,
            b'~' => Tok::Tilde,
            b'.' => Tok::Dot,
            b'|' if bytes.get(i + 1) == Some(&b'-') => {
                i += 1;
                Tok::Turnstile
            }
            b'|' => Tok::Bar,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Arrow
            }
            c if c.is_ascii_alphabetic() || c == b'@' => {
                i += 1;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let found = text[i..].chars().next().map(|c| format!("`{c}`")).unwrap_or_default();
                return Err(ParseError::Syntax {
                    offset: i,
                    expected: vec!["a token".into()],
                    found,
                });
            }
        };
        i += 1;
        out.push((tok, start));
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    arities: &'a mut BTreeMap<String, usize>,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, tok: Tok, name: &str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn register(&mut self, name: &str, arity: usize, offset: usize) -> Result<(), ParseError> {
        match self.arities.get(name) {
            Some(&expected) if expected != arity => Err(ParseError::Arity {
                name: name.to_string(),
                expected,
                found: arity,
                offset,
            }),
            Some(_) => Ok(()),
            None => {
                self.arities.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.formula()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.conjunction()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Ident(kw) if kw == "forall" || kw == "exists" => {
                self.bump();
                let offset = self.offset();
                let var = match self.bump() {
                    Tok::Ident(v) if is_variable_name(&v) => v,
                    Tok::Ident(v) => return Err(ParseError::BinderNotVariable { name: v, offset }),
                    _ => {
                        self.pos -= 1;
                        return Err(self.error(&["a variable"]));
                    }
                };
                self.expect(Tok::Dot, "`.`")?;
                let body = self.formula()?;
                Ok(if kw == "forall" {
                    Formula::forall(&var, body)
                } else {
                    Formula::exists(&var, body)
                })
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::Ident(_) => self.atom(),
            _ => Err(self.error(&["a formula"])),
        }
    }

    fn term_from(&self, name: &str, offset: usize) -> Result<Term, ParseError> {
        if is_variable_name(name) {
            Ok(Term::Var(name.to_string()))
        } else if is_constant_name(name) && name != "forall" && name != "exists" {
            Ok(Term::Const(name.to_string()))
        } else {
            Err(ParseError::Syntax {
                offset,
                expected: vec!["a term".into()],
                found: format!("`{name}`"),
            })
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let offset = self.offset();
        match self.peek().clone() {
            Tok::Ident(name) => {
                let t = self.term_from(&name, offset)?;
                self.bump();
                Ok(t)
            }
            _ => Err(self.error(&["a term"])),
        }
    }

    /// Splits `Pa` into (`P`, `a`) when the identifier has the compact shape.
    fn split_compact(name: &str) -> Option<(&str, &str)> {
        let mut chars = name.char_indices();
        let (_, first) = chars.next()?;
        let (idx, second) = chars.next()?;
        if first.is_ascii_uppercase() && (second.is_ascii_lowercase() || second == '@') {
            Some((&name[..idx], &name[idx..]))
        } else {
            None
        }
    }

    fn atom(&mut self) -> Result<Formula, ParseError> {
        let offset = self.offset();
        let Tok::Ident(name) = self.bump() else {
            unreachable!("atom called on identifier")
        };
        if is_predicate_name(&name) {
            if *self.peek() == Tok::LParen {
                self.bump();
                let mut args = Vec::new();
                if *self.peek() != Tok::RParen {
                    args.push(self.term()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.term()?);
                    }
                }
                self.expect(Tok::RParen, "`)`")?;
                self.register(&name, args.len(), offset)?;
                return Ok(Formula::Atom(Atom::Pred { name, args }));
            }
            if let Some((pred, term)) = Self::split_compact(&name) {
                let t = self.term_from(term, offset + pred.len())?;
                self.register(pred, 1, offset)?;
                return Ok(Formula::pred(pred, [t]));
            }
            self.register(&name, 0, offset)?;
            return Ok(Formula::Atom(Atom::Pred { name, args: vec![] }));
        }
        // Similarity: `t ~P u` or the compact `t ~Pu`.
        let left = self.term_from(&name, offset)?;
        self.expect(Tok::Tilde, "`~`")?;
        let base_offset = self.offset();
        let base = match self.bump() {
            Tok::Ident(b) if is_predicate_name(&b) => b,
            _ => {
                self.pos -= 1;
                return Err(self.error(&["a predicate name"]));
            }
        };
        let (base, right) = match Self::split_compact(&base) {
            Some((pred, term)) => {
                let t = self.term_from(term, base_offset + pred.len())?;
                (pred.to_string(), t)
            }
            None => (base.clone(), self.term()?),
        };
        self.register(&base, 1, base_offset)?;
        Ok(Formula::Atom(Atom::Sim { base, left, right }))
    }

    fn side(&mut self, stop: &Tok) -> Result<Vec<Formula>, ParseError> {
        let mut out = Vec::new();
        if self.peek() == stop {
            return Ok(out);
        }
        out.push(self.formula()?);
        while *self.peek() == Tok::Comma {
            self.bump();
            out.push(self.formula()?);
        }
        Ok(out)
    }
}

/// Parses a single formula. Free variables are allowed.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    parse_formula_with(text, &mut BTreeMap::new())
}

/// Parses a formula, checking and extending a shared arity table.
pub fn parse_formula_with(
    text: &str,
    arities: &mut BTreeMap<String, usize>,
) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, arities };
    let f = p.formula()?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["`&`", "`|`", "`->`", "end of input"]));
    }
    Ok(f)
}

/// Parses `F1, ..., Fm |- G1, ..., Gk`. Every formula must be closed.
pub fn parse_sequent(text: &str) -> Result<Sequent, ParseError> {
    let toks = lex(text)?;
    let mut arities = BTreeMap::new();
    let mut p = Parser {
        toks,
        pos: 0,
        arities: &mut arities,
    };
    let left = p.side(&Tok::Turnstile)?;
    if *p.peek() != Tok::Turnstile {
        return Err(p.error(&["`,`", "`|-`"]));
    }
    p.bump();
    let right = p.side(&Tok::End)?;
    if *p.peek() != Tok::End {
        return Err(p.error(&["`,`", "end of input"]));
    }
    let sequent = Sequent::new(left, right);
    let free: std::collections::BTreeSet<String> =
        sequent.formulas().flat_map(Formula::free_variables).collect();
    if !free.is_empty() {
        return Err(ParseError::FreeVariables {
            vars: free.into_iter().collect(),
        });
    }
    Ok(sequent)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(n: &str) -> Term {
        Term::constant(n)
    }

    #[test]
    fn tolerance_instance() {
        let f = parse_formula("P(a) & a ~P b -> P(b)").unwrap();
        let expected = Formula::implies(
            Formula::and(Formula::pred("P", [c("a")]), Formula::sim("P", c("a"), c("b"))),
            Formula::pred("P", [c("b")]),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn quantified_tolerance() {
        let f = parse_formula("forall x. forall y. (P(x) & x ~P y -> P(y))").unwrap();
        let body = Formula::implies(
            Formula::and(Formula::pred("P", ["x"]), Formula::sim("P", "x", "y")),
            Formula::pred("P", ["y"]),
        );
        assert_eq!(f, Formula::forall("x", Formula::forall("y", body)));
        assert!(f.is_closed());
    }

    #[test]
    fn unclosed_paren_reports_offset() {
        match parse_formula("P(a") {
            Err(ParseError::Syntax { offset, expected, .. }) => {
                assert_eq!(offset, 3);
                assert!(expected.iter().any(|e| e.contains(')')));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn arity_mismatch_is_rejected() {
        assert!(matches!(
            parse_formula("P(a) & P(a,b)"),
            Err(ParseError::Arity { expected: 1, found: 2, .. })
        ));
        assert!(matches!(
            parse_sequent("R(a,b) |- a ~R b"),
            Err(ParseError::Arity { .. })
        ));
    }

    #[test]
    fn compact_atoms() {
        let s = parse_sequent("Pt1, t1~Pt2, t2~Pt3 |- Pt3").unwrap();
        assert_eq!(s.left.len(), 3);
        assert!(s.left.contains(&Formula::sim("P", c("t1"), c("t2"))));
        assert!(s.right.contains(&Formula::pred("P", [c("t3")])));
        assert_eq!(
            parse_formula("(Pa & a~Pb) -> Pb").unwrap(),
            parse_formula("P(a) & a ~P b -> P(b)").unwrap()
        );
    }

    #[test]
    fn sequent_sides() {
        let s = parse_sequent("P(a), a ~P b |- P(b)").unwrap();
        assert_eq!((s.left.len(), s.right.len()), (2, 1));
        let s = parse_sequent("|- P(a) | !P(a)").unwrap();
        assert!(s.left.is_empty());
        assert_eq!(s.right.len(), 1);
        let s = parse_sequent("P(a) |-").unwrap();
        assert!(s.right.is_empty());
        assert_eq!(parse_sequent("|-").unwrap(), Sequent::default());
    }

    #[test]
    fn free_variables_rejected_in_sequents() {
        assert_eq!(
            parse_sequent("P(x) |- P(x)"),
            Err(ParseError::FreeVariables { vars: vec!["x".into()] })
        );
    }

    #[test]
    fn binder_must_be_variable() {
        assert!(matches!(
            parse_formula("forall a. P(a)"),
            Err(ParseError::BinderNotVariable { .. })
        ));
    }

    #[test]
    fn quantifier_scope_extends_right() {
        let f = parse_formula("forall x. P(x) & Q(x)").unwrap();
        assert!(matches!(f, Formula::Forall(_, ref b) if matches!(**b, Formula::And(..))));
        let g = parse_formula("Q(a) -> exists x. P(x) | Q(x)").unwrap();
        assert!(matches!(g, Formula::Implies(_, ref b) if matches!(**b, Formula::Exists(..))));
    }

    #[test]
    fn zero_ary_and_eigenvariables() {
        assert_eq!(parse_formula("A").unwrap(), parse_formula("A()").unwrap());
        let f = parse_formula("P(@e0) & @e0 ~P b").unwrap();
        assert_eq!(f.constants().len(), 2);
    }

    #[test]
    fn trailing_garbage() {
        assert!(matches!(parse_formula("P(a) P(b)"), Err(ParseError::Syntax { offset: 5, .. })));
        assert!(parse_formula("P(a) $").is_err());
    }
}
