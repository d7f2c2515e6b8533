use std::collections::BTreeSet;

use super::ProofNode;
use crate::syntax::{Atom, Formula, RuleName, Sequent, Term};

/// Outcome of checking a proof tree. `path` lists premise indices from the
/// root down to the first failing node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub ok: bool,
    pub path: Vec<usize>,
    pub reason: Option<String>,
}

impl CheckReport {
    fn pass() -> CheckReport {
        CheckReport {
            ok: true,
            path: Vec::new(),
            reason: None,
        }
    }

    fn fail(path: Vec<usize>, reason: impl Into<String>) -> CheckReport {
        CheckReport {
            ok: false,
            path,
            reason: Some(reason.into()),
        }
    }
}

/// Cut is not part of the calculus; every attempt to use it is rejected.
pub fn cut_node(_left: &ProofNode, _right: &ProofNode, _cut_formula: &Formula) -> CheckReport {
    CheckReport::fail(Vec::new(), "Cut is not a rule of ST∼")
}

/// Checks every node of the tree against its rule schema.
pub fn check_proof(root: &ProofNode) -> CheckReport {
    let mut path = Vec::new();
    match check_tree(root, &mut path) {
        Ok(()) => CheckReport::pass(),
        Err(reason) => CheckReport::fail(path, reason),
    }
}

fn check_tree(node: &ProofNode, path: &mut Vec<usize>) -> Result<(), String> {
    check_node(node)?;
    for (i, premise) in node.premises.iter().enumerate() {
        path.push(i);
        check_tree(premise, path)?;
        path.pop();
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Left,
    Right,
}

fn side_of(s: &Sequent, side: Side) -> &BTreeSet<Formula> {
    match side {
        Side::Left => &s.left,
        Side::Right => &s.right,
    }
}

/// Formulas added to each side of one premise.
struct Added {
    left: Vec<Formula>,
    right: Vec<Formula>,
}

fn added(left: Vec<Formula>, right: Vec<Formula>) -> Added {
    Added { left, right }
}

/// Whether the premises are the conclusion with `removed` taken out (each
/// optionally kept, since sides are sets) and the listed formulas added.
fn fits(conclusion: &Sequent, removed: &[(Side, &Formula)], premises: &[ProofNode], adds: &[Added]) -> Result<(), String> {
    for (side, f) in removed {
        if !side_of(conclusion, *side).contains(*f) {
            return Err(format!("principal formula {f} is not in the conclusion"));
        }
    }
    for keep in 0..(1u32 << removed.len()) {
        let mut ctx = conclusion.clone();
        for (i, (side, f)) in removed.iter().enumerate() {
            if keep & (1 << i) == 0 {
                match side {
                    Side::Left => ctx.left.remove(*f),
                    Side::Right => ctx.right.remove(*f),
                };
            }
        }
        let all = premises.iter().zip(adds).all(|(p, add)| {
            let mut expected = ctx.clone();
            expected.left.extend(add.left.iter().cloned());
            expected.right.extend(add.right.iter().cloned());
            p.conclusion == expected
        });
        if all {
            return Ok(());
        }
    }
    Err("premises do not match the rule schema".to_string())
}

fn principal(node: &ProofNode) -> Result<&Formula, String> {
    node.principal
        .as_ref()
        .ok_or_else(|| format!("{} needs a principal formula", node.rule))
}

fn constant_term(node: &ProofNode) -> Result<&Term, String> {
    match &node.term {
        Some(t @ Term::Const(_)) => Ok(t),
        Some(Term::Var(v)) => Err(format!("instantiating term {v} is not a constant")),
        None => Err(format!("{} needs a term", node.rule)),
    }
}

fn sim_parts(f: &Formula) -> Option<(&str, &Term, &Term)> {
    match f {
        Formula::Atom(Atom::Sim { base, left, right }) => Some((base, left, right)),
        _ => None,
    }
}

fn check_node(node: &ProofNode) -> Result<(), String> {
    let rule = node.rule;
    if node.premises.len() != rule.arity() {
        return Err(format!(
            "{rule} takes {} premise(s), found {}",
            rule.arity(),
            node.premises.len()
        ));
    }
    let c = &node.conclusion;
    let prem = &node.premises;
    match rule {
        RuleName::Id => {
            let shared = c.left.intersection(&c.right).next();
            match (&node.principal, shared) {
                (Some(p), _) if c.left.contains(p) && c.right.contains(p) => Ok(()),
                (Some(p), _) => Err(format!("{p} is not on both sides")),
                (None, Some(_)) => Ok(()),
                (None, None) => Err("no formula occurs on both sides".to_string()),
            }
        }
        RuleName::K => {
            if prem[0].conclusion.is_subsequent_of(c) {
                Ok(())
            } else {
                Err("premise is not contained in the conclusion".to_string())
            }
        }
        RuleName::NotL | RuleName::NotR => {
            let p = principal(node)?;
            let Formula::Not(a) = p else {
                return Err(format!("{p} is not a negation"));
            };
            let a = (**a).clone();
            if rule == RuleName::NotL {
                fits(c, &[(Side::Left, p)], prem, &[added(vec![], vec![a])])
            } else {
                fits(c, &[(Side::Right, p)], prem, &[added(vec![a], vec![])])
            }
        }
        RuleName::AndL | RuleName::AndR => {
            let p = principal(node)?;
            let Formula::And(a, b) = p else {
                return Err(format!("{p} is not a conjunction"));
            };
            let (a, b) = ((**a).clone(), (**b).clone());
            if rule == RuleName::AndL {
                fits(c, &[(Side::Left, p)], prem, &[added(vec![a, b], vec![])])
            } else {
                fits(
                    c,
                    &[(Side::Right, p)],
                    prem,
                    &[added(vec![], vec![a]), added(vec![], vec![b])],
                )
            }
        }
        RuleName::OrL | RuleName::OrR => {
            let p = principal(node)?;
            let Formula::Or(a, b) = p else {
                return Err(format!("{p} is not a disjunction"));
            };
            let (a, b) = ((**a).clone(), (**b).clone());
            if rule == RuleName::OrL {
                fits(
                    c,
                    &[(Side::Left, p)],
                    prem,
                    &[added(vec![a], vec![]), added(vec![b], vec![])],
                )
            } else {
                fits(c, &[(Side::Right, p)], prem, &[added(vec![], vec![a, b])])
            }
        }
        RuleName::ImpL | RuleName::ImpR => {
            let p = principal(node)?;
            let Formula::Implies(a, b) = p else {
                return Err(format!("{p} is not a conditional"));
            };
            let (a, b) = ((**a).clone(), (**b).clone());
            if rule == RuleName::ImpL {
                fits(
                    c,
                    &[(Side::Left, p)],
                    prem,
                    &[added(vec![], vec![a]), added(vec![b], vec![])],
                )
            } else {
                fits(c, &[(Side::Right, p)], prem, &[added(vec![a], vec![b])])
            }
        }
        RuleName::ForallL | RuleName::ForallR | RuleName::ExistsL | RuleName::ExistsR => {
            let p = principal(node)?;
            let (var, body, universal) = match p {
                Formula::Forall(v, b) => (v, b, true),
                Formula::Exists(v, b) => (v, b, false),
                _ => return Err(format!("{p} is not quantified")),
            };
            let want_universal = matches!(rule, RuleName::ForallL | RuleName::ForallR);
            if universal != want_universal {
                return Err(format!("{p} has the wrong quantifier for {rule}"));
            }
            let t = constant_term(node)?;
            if rule.is_eigenvariable_rule() && c.constants().contains(t.name()) {
                return Err(format!("eigenvariable {t} occurs in conclusion"));
            }
            let instance = body.substitute(var, t);
            let on_left = matches!(rule, RuleName::ForallL | RuleName::ExistsL);
            if on_left {
                fits(c, &[(Side::Left, p)], prem, &[added(vec![instance], vec![])])
            } else {
                fits(c, &[(Side::Right, p)], prem, &[added(vec![], vec![instance])])
            }
        }
        RuleName::SimRef => {
            let p = principal(node)?;
            match sim_parts(p) {
                Some((_, l, r)) if l == r => fits(c, &[], prem, &[added(vec![p.clone()], vec![])]),
                _ => Err(format!("{p} is not of the form t ~P t")),
            }
        }
        RuleName::SimSymL | RuleName::SimSymR => {
            let p = principal(node)?;
            let Some((base, l, r)) = sim_parts(p) else {
                return Err(format!("{p} is not a similarity atom"));
            };
            let flipped = Formula::sim(base, r.clone(), l.clone());
            if rule == RuleName::SimSymL {
                fits(c, &[(Side::Left, p)], prem, &[added(vec![flipped], vec![])])
            } else {
                fits(c, &[(Side::Right, p)], prem, &[added(vec![], vec![flipped])])
            }
        }
        RuleName::Tol => {
            let p = principal(node)?;
            let Some((base, t, u)) = sim_parts(p) else {
                return Err(format!("{p} is not a similarity atom"));
            };
            let pt = Formula::pred(base, [t.clone()]);
            let pu = Formula::pred(base, [u.clone()]);
            fits(
                c,
                &[(Side::Left, &pt), (Side::Right, &pu)],
                prem,
                &[added(vec![], vec![p.clone()])],
            )
        }
    }
}
