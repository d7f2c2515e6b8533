//! Terms, formulas with similarity atoms, sequents and proof-rule names.
//!
//! Namespaces are fixed by spelling: predicate names start with an uppercase
//! letter, variables with one of `u`..`z`, and constants with any other
//! lowercase letter or the reserved `@` prefix used for eigenvariables.

mod parse;
mod print;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

pub use parse::{parse_formula, parse_formula_with, parse_sequent, ParseError};

/// Prefix reserved for constants generated during proof search.
pub const EIGEN_PREFIX: char = '@';

/// Whether `name` is spelled as a variable.
pub fn is_variable_name(name: &str) -> bool {
    matches!(name.chars().next(), Some('u'..='z')) && is_identifier_tail(&name[1..])
}

/// Whether `name` is spelled as a constant (user constant or reserved eigenvariable).
pub fn is_constant_name(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some('a'..='t') => is_identifier_tail(chars.as_str()),
        Some(EIGEN_PREFIX) => {
            let rest = chars.as_str();
            !rest.is_empty() && is_identifier_tail(rest)
        }
        _ => false,
    }
}

/// Whether `name` is spelled as a predicate.
pub fn is_predicate_name(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('A'..='Z')) && is_identifier_tail(chars.as_str())
}

fn is_identifier_tail(s: &str) -> bool {
    s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(String),
    Var(String),
}

impl Term {
    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Const(n) | Term::Var(n) => n,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Term::Const(_))
    }

    fn substitute(&self, var: &str, t: &Term) -> Term {
        match self {
            Term::Var(v) if v == var => t.clone(),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    /// `P(t1, ..., tn)`.
    Pred { name: String, args: Vec<Term> },
    /// `t ~P u`: similarity in respect of the base predicate `P`.
    Sim { base: String, left: Term, right: Term },
}

impl Atom {
    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Atom::Pred { args, .. } => args.iter().collect(),
            Atom::Sim { left, right, .. } => vec![left, right],
        }
    }

    fn substitute(&self, var: &str, t: &Term) -> Atom {
        match self {
            Atom::Pred { name, args } => Atom::Pred {
                name: name.clone(),
                args: args.iter().map(|a| a.substitute(var, t)).collect(),
            },
            Atom::Sim { base, left, right } => Atom::Sim {
                base: base.clone(),
                left: left.substitute(var, t),
                right: right.substitute(var, t),
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(Atom),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn pred<I, T>(name: &str, args: I) -> Formula
    where
        I: IntoIterator<Item = T>,
        T: Into<Term>,
    {
        Formula::Atom(Atom::Pred {
            name: name.to_string(),
            args: args.into_iter().map(Into::into).collect(),
        })
    }

    pub fn sim(base: &str, left: impl Into<Term>, right: impl Into<Term>) -> Formula {
        Formula::Atom(Atom::Sim {
            base: base.to_string(),
            left: left.into(),
            right: right.into(),
        })
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(var: &str, body: Formula) -> Formula {
        Formula::Forall(var.to_string(), Box::new(body))
    }

    pub fn exists(var: &str, body: Formula) -> Formula {
        Formula::Exists(var.to_string(), Box::new(body))
    }

    /// Free variables; binders shadow.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free<'a>(&'a self, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom(a) => {
                for t in a.terms() {
                    if let Term::Var(v) = t {
                        if !bound.contains(&v.as_str()) {
                            out.insert(v.clone());
                        }
                    }
                }
            }
            Formula::Not(a) => a.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(v);
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Replaces free occurrences of `var` by `t`. `t` is expected to be a
    /// constant, so no capture can occur.
    pub fn substitute(&self, var: &str, t: &Term) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(a.substitute(var, t)),
            Formula::Not(a) => Formula::not(a.substitute(var, t)),
            Formula::And(a, b) => Formula::and(a.substitute(var, t), b.substitute(var, t)),
            Formula::Or(a, b) => Formula::or(a.substitute(var, t), b.substitute(var, t)),
            Formula::Implies(a, b) => {
                Formula::implies(a.substitute(var, t), b.substitute(var, t))
            }
            Formula::Forall(v, _) | Formula::Exists(v, _) if v == var => self.clone(),
            Formula::Forall(v, body) => Formula::forall(v, body.substitute(var, t)),
            Formula::Exists(v, body) => Formula::exists(v, body.substitute(var, t)),
        }
    }

    /// Replaces every occurrence of constant `c` by variable `var`. The
    /// variable should not be bound anywhere in the formula.
    pub fn abstract_constant(&self, c: &str, var: &str) -> Formula {
        let swap = |t: &Term| match t {
            Term::Const(n) if n == c => Term::var(var),
            _ => t.clone(),
        };
        match self {
            Formula::Atom(Atom::Pred { name, args }) => Formula::Atom(Atom::Pred {
                name: name.clone(),
                args: args.iter().map(swap).collect(),
            }),
            Formula::Atom(Atom::Sim { base, left, right }) => Formula::Atom(Atom::Sim {
                base: base.clone(),
                left: swap(left),
                right: swap(right),
            }),
            Formula::Not(a) => Formula::not(a.abstract_constant(c, var)),
            Formula::And(a, b) => Formula::and(a.abstract_constant(c, var), b.abstract_constant(c, var)),
            Formula::Or(a, b) => Formula::or(a.abstract_constant(c, var), b.abstract_constant(c, var)),
            Formula::Implies(a, b) => {
                Formula::implies(a.abstract_constant(c, var), b.abstract_constant(c, var))
            }
            Formula::Forall(v, body) => Formula::forall(v, body.abstract_constant(c, var)),
            Formula::Exists(v, body) => Formula::exists(v, body.abstract_constant(c, var)),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::Atom(_) => true,
            Formula::Not(a) => a.is_quantifier_free(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    pub fn contains_similarity(&self) -> bool {
        let mut found = false;
        self.visit_atoms(&mut |a| found |= matches!(a, Atom::Sim { .. }));
        found
    }

    pub fn visit_atoms<'a>(&'a self, visit: &mut impl FnMut(&'a Atom)) {
        match self {
            Formula::Atom(a) => visit(a),
            Formula::Not(a) => a.visit_atoms(visit),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.visit_atoms(visit);
                b.visit_atoms(visit);
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => body.visit_atoms(visit),
        }
    }

    /// Constants occurring anywhere in the formula.
    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            for t in a.terms() {
                if let Term::Const(c) = t {
                    out.insert(c.clone());
                }
            }
        });
        out
    }

    /// Number of connectives, quantifiers and atoms.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atom(_) => 1,
            Formula::Not(a) => 1 + a.size(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                1 + a.size() + b.size()
            }
            Formula::Forall(_, body) | Formula::Exists(_, body) => 1 + body.size(),
        }
    }
}

impl From<&str> for Term {
    /// Classifies the name by its spelling.
    fn from(name: &str) -> Term {
        if is_variable_name(name) {
            Term::Var(name.to_string())
        } else {
            Term::Const(name.to_string())
        }
    }
}

/// Predicate arities, similarity bases and constants used by a problem.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub predicates: BTreeMap<String, usize>,
    pub sim_bases: BTreeSet<String>,
    pub constants: BTreeSet<String>,
}

impl Signature {
    pub fn add_formula(&mut self, f: &Formula) {
        f.visit_atoms(&mut |a| match a {
            Atom::Pred { name, args } => {
                self.predicates.entry(name.clone()).or_insert(args.len());
            }
            Atom::Sim { base, .. } => {
                self.sim_bases.insert(base.clone());
                self.predicates.entry(base.clone()).or_insert(1);
            }
        });
        self.constants.extend(f.constants());
    }

    pub fn of_formula(f: &Formula) -> Signature {
        let mut sig = Signature::default();
        sig.add_formula(f);
        sig
    }

    pub fn merge(&mut self, other: &Signature) {
        for (name, arity) in &other.predicates {
            self.predicates.entry(name.clone()).or_insert(*arity);
        }
        self.sim_bases.extend(other.sim_bases.iter().cloned());
        self.constants.extend(other.constants.iter().cloned());
    }
}

/// An argument `Γ |- Δ`. Both sides are finite sets.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sequent {
    pub left: BTreeSet<Formula>,
    pub right: BTreeSet<Formula>,
}

impl Sequent {
    pub fn new<L, R>(left: L, right: R) -> Sequent
    where
        L: IntoIterator<Item = Formula>,
        R: IntoIterator<Item = Formula>,
    {
        Sequent {
            left: left.into_iter().collect(),
            right: right.into_iter().collect(),
        }
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.left.iter().chain(self.right.iter())
    }

    pub fn is_closed(&self) -> bool {
        self.formulas().all(Formula::is_closed)
    }

    pub fn is_quantifier_free(&self) -> bool {
        self.formulas().all(Formula::is_quantifier_free)
    }

    pub fn contains_similarity(&self) -> bool {
        self.formulas().any(Formula::contains_similarity)
    }

    pub fn signature(&self) -> Signature {
        let mut sig = Signature::default();
        for f in self.formulas() {
            sig.add_formula(f);
        }
        sig
    }

    pub fn constants(&self) -> BTreeSet<String> {
        self.formulas().flat_map(Formula::constants).collect()
    }

    /// Componentwise inclusion: `self` is a weakening-premise of `other`.
    pub fn is_subsequent_of(&self, other: &Sequent) -> bool {
        self.left.is_subset(&other.left) && self.right.is_subset(&other.right)
    }

    /// Distinct atoms occurring in the sequent.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for f in self.formulas() {
            f.visit_atoms(&mut |a| {
                out.insert(a.clone());
            });
        }
        out
    }
}

/// Rules of the ST~ sequent calculus. There is no Cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleName {
    Id,
    K,
    NotL,
    NotR,
    AndL,
    AndR,
    OrL,
    OrR,
    ImpL,
    ImpR,
    ForallL,
    ForallR,
    ExistsL,
    ExistsR,
    SimRef,
    SimSymL,
    SimSymR,
    Tol,
}

impl RuleName {
    pub const ALL: [RuleName; 18] = [
        RuleName::Id,
        RuleName::K,
        RuleName::NotL,
        RuleName::NotR,
        RuleName::AndL,
        RuleName::AndR,
        RuleName::OrL,
        RuleName::OrR,
        RuleName::ImpL,
        RuleName::ImpR,
        RuleName::ForallL,
        RuleName::ForallR,
        RuleName::ExistsL,
        RuleName::ExistsR,
        RuleName::SimRef,
        RuleName::SimSymL,
        RuleName::SimSymR,
        RuleName::Tol,
    ];

    /// Number of premises the rule takes.
    pub fn arity(self) -> usize {
        match self {
            RuleName::Id => 0,
            RuleName::AndR | RuleName::OrL | RuleName::ImpL => 2,
            _ => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RuleName::Id => "Id",
            RuleName::K => "K",
            RuleName::NotL => "NotL",
            RuleName::NotR => "NotR",
            RuleName::AndL => "AndL",
            RuleName::AndR => "AndR",
            RuleName::OrL => "OrL",
            RuleName::OrR => "OrR",
            RuleName::ImpL => "ImpL",
            RuleName::ImpR => "ImpR",
            RuleName::ForallL => "ForallL",
            RuleName::ForallR => "ForallR",
            RuleName::ExistsL => "ExistsL",
            RuleName::ExistsR => "ExistsR",
            RuleName::SimRef => "SimRef",
            RuleName::SimSymL => "SimSymL",
            RuleName::SimSymR => "SimSymR",
            RuleName::Tol => "Tol",
        }
    }

    pub fn from_name(name: &str) -> Option<RuleName> {
        RuleName::ALL.into_iter().find(|r| r.as_str() == name)
    }

    /// Rules that introduce a fresh eigenvariable.
    pub fn is_eigenvariable_rule(self) -> bool {
        matches!(self, RuleName::ForallR | RuleName::ExistsL)
    }
}

impl fmt::Display for RuleName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
