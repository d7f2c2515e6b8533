use std::collections::BTreeMap;

use thiserror::Error;

use super::model::{Element, Model};
use super::value::TruthValue;
use crate::syntax::{Atom, Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("constant `{0}` is not mapped by the model")]
    UnmappedConstant(String),
    #[error("variable `{0}` is unbound")]
    UnboundVariable(String),
    #[error("predicate `{0}` is not interpreted with that arity")]
    UnknownPredicate(String),
    #[error("similarity ~{0} is not interpreted")]
    UnknownSimilarity(String),
}

/// Values for variables in scope; quantifiers evaluate over x-variants.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(BTreeMap<String, Element>);

impl Assignment {
    pub fn new() -> Assignment {
        Assignment::default()
    }

    pub fn with(mut self, var: &str, e: Element) -> Assignment {
        self.0.insert(var.to_string(), e);
        self
    }

    pub fn get(&self, var: &str) -> Option<Element> {
        self.0.get(var).copied()
    }

    fn set(&mut self, var: &str, e: Element) -> Option<Element> {
        self.0.insert(var.to_string(), e)
    }

    fn restore(&mut self, var: &str, previous: Option<Element>) {
        match previous {
            Some(e) => {
                self.0.insert(var.to_string(), e);
            }
            None => {
                self.0.remove(var);
            }
        }
    }
}

fn denote(m: &Model, t: &Term, a: &Assignment) -> Result<Element, EvalError> {
    match t {
        Term::Const(c) => m
            .constant(c)
            .ok_or_else(|| EvalError::UnmappedConstant(c.clone())),
        Term::Var(v) => a.get(v).ok_or_else(|| EvalError::UnboundVariable(v.clone())),
    }
}

/// Value of an atom under an assignment.
pub fn eval_atom(m: &Model, atom: &Atom, a: &Assignment) -> Result<TruthValue, EvalError> {
    match atom {
        Atom::Pred { name, args } => {
            let tuple = args
                .iter()
                .map(|t| denote(m, t, a))
                .collect::<Result<Vec<_>, _>>()?;
            m.pred_value(name, &tuple)
                .ok_or_else(|| EvalError::UnknownPredicate(name.clone()))
        }
        Atom::Sim { base, left, right } => {
            let (l, r) = (denote(m, left, a)?, denote(m, right, a)?);
            m.sim_value(base, l, r)
                .ok_or_else(|| EvalError::UnknownSimilarity(base.clone()))
        }
    }
}

/// Compositional value: `!` is `1 - x`, `&`/`|` are min/max, `A -> B` is
/// `max(1 - A, B)`, and quantifiers take min/max over the domain.
pub fn eval(m: &Model, f: &Formula, a: &Assignment) -> Result<TruthValue, EvalError> {
    let mut scratch = a.clone();
    eval_in(m, f, &mut scratch)
}

fn eval_in(m: &Model, f: &Formula, a: &mut Assignment) -> Result<TruthValue, EvalError> {
    Ok(match f {
        Formula::Atom(atom) => eval_atom(m, atom, a)?,
        Formula::Not(x) => eval_in(m, x, a)?.complement(),
        Formula::And(x, y) => eval_in(m, x, a)?.min(eval_in(m, y, a)?),
        Formula::Or(x, y) => eval_in(m, x, a)?.max(eval_in(m, y, a)?),
        Formula::Implies(x, y) => eval_in(m, x, a)?.complement().max(eval_in(m, y, a)?),
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            let universal = matches!(f, Formula::Forall(..));
            let previous = a.get(v);
            let mut acc = if universal {
                TruthValue::ONE
            } else {
                TruthValue::ZERO
            };
            for d in 0..m.domain_size() {
                a.set(v, d);
                let value = eval_in(m, body, a);
                let value = match value {
                    Ok(value) => value,
                    Err(e) => {
                        a.restore(v, previous);
                        return Err(e);
                    }
                };
                acc = if universal { acc.min(value) } else { acc.max(value) };
            }
            a.restore(v, previous);
            acc
        }
    })
}

/// Value of a closed formula.
pub fn eval_closed(m: &Model, f: &Formula) -> Result<TruthValue, EvalError> {
    eval(m, f, &Assignment::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::ModelBuilder;
    use crate::syntax::parse_formula;

    fn tv(s: &str) -> TruthValue {
        s.parse().unwrap()
    }

    fn two_point() -> Model {
        ModelBuilder::new(["d1", "d2"])
            .constant("a", "d1")
            .unwrap()
            .constant("b", "d2")
            .unwrap()
            .pred("P", &["d1"], tv("0.6"))
            .unwrap()
            .pred("P", &["d2"], tv("0.4"))
            .unwrap()
            .sim("P", "d1", "d2", tv("0.6"))
            .unwrap()
            .build()
            .unwrap()
    }

    #[test]
    fn negation_complements() {
        let m = two_point();
        let f = parse_formula("!P(a)").unwrap();
        assert_eq!(eval_closed(&m, &f).unwrap(), tv("0.4"));
    }

    #[test]
    fn tolerance_conditional_at_six_six_four() {
        let m = two_point();
        let f = parse_formula("P(a) & a ~P b -> P(b)").unwrap();
        assert_eq!(eval_closed(&m, &f).unwrap(), tv("0.4"));
    }

    #[test]
    fn universal_is_minimum() {
        let m = ModelBuilder::new(["d1", "d2"])
            .pred("P", &["d1"], TruthValue::ONE)
            .unwrap()
            .pred("P", &["d2"], TruthValue::HALF)
            .unwrap()
            .build()
            .unwrap();
        let all = parse_formula("forall x. P(x)").unwrap();
        let some = parse_formula("exists x. P(x)").unwrap();
        assert_eq!(eval_closed(&m, &all).unwrap(), TruthValue::HALF);
        assert_eq!(eval_closed(&m, &some).unwrap(), TruthValue::ONE);
    }

    #[test]
    fn shadowed_binder_restores_outer_value() {
        let m = two_point();
        let f = parse_formula("forall x. (P(x) | (exists x. P(x))) & P(x)").unwrap();
        assert_eq!(eval_closed(&m, &f).unwrap(), tv("0.4"));
    }

    #[test]
    fn errors_name_the_missing_symbol() {
        let m = two_point();
        let f = parse_formula("P(c)").unwrap();
        assert_eq!(
            eval_closed(&m, &f),
            Err(EvalError::UnmappedConstant("c".into()))
        );
        let f = parse_formula("Q(a)").unwrap();
        assert_eq!(
            eval_closed(&m, &f),
            Err(EvalError::UnknownPredicate("Q".into()))
        );
        let open = Formula::pred("P", [Term::var("x")]);
        assert_eq!(
            eval_closed(&m, &open),
            Err(EvalError::UnboundVariable("x".into()))
        );
    }
}
