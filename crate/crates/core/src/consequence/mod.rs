//! Countermodels for parameterised consequence, plain and tolerant, with a
//! bounded decision procedure, metainference sampling and the model-level
//! tolerance checks.

mod meta;
mod search;

use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::parameter::{Parameter, Violation};
use crate::semantics::{eval_closed, Element, EvalError, Model, TruthValue};
use crate::syntax::{Formula, Sequent, Term};

pub use meta::{
    check_metainference_closure, library_instances, ClosureReport, MetaInstance, MetaRule,
};
pub use search::{decide, decide_with, find_countermodel, sound_rules, value_grid, zone_representatives};

/// Whether countermodels must also respect the parameter's tolerance clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Plain,
    Tolerant,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Plain => "plain",
            Mode::Tolerant => "tolerant",
        })
    }
}

/// Limits for model search and proof search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    pub max_domain: usize,
    /// Interior grid points per zone when `V` is the unit interval.
    pub values_per_zone: usize,
    pub timeout: Duration,
    pub proof_depth: usize,
    pub term_pool_extra: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_domain: 3,
            values_per_zone: 2,
            timeout: Duration::from_secs(10),
            proof_depth: 20,
            term_pool_extra: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Valid {
        method: String,
    },
    Invalid {
        countermodel: Model,
        method: String,
    },
    UnknownUpToBounds {
        domain_bound: usize,
        value_grid: String,
        /// Set when the search stopped on its deadline.
        elapsed: Option<Duration>,
    },
}

/// The verdict without its payload.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Status {
    Valid,
    Invalid,
    Unknown,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Valid => "valid",
            Status::Invalid => "invalid",
            Status::Unknown => "unknown",
        })
    }
}

impl Verdict {
    pub fn status(&self) -> Status {
        match self {
            Verdict::Valid { .. } => Status::Valid,
            Verdict::Invalid { .. } => Status::Invalid,
            Verdict::UnknownUpToBounds { .. } => Status::Unknown,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.status() == Status::Valid
    }

    pub fn is_invalid(&self) -> bool {
        self.status() == Status::Invalid
    }

    pub fn countermodel(&self) -> Option<&Model> {
        match self {
            Verdict::Invalid { countermodel, .. } => Some(countermodel),
            _ => None,
        }
    }

    /// How the verdict was reached, empty for unknown verdicts.
    pub fn method(&self) -> &str {
        match self {
            Verdict::Valid { method } | Verdict::Invalid { method, .. } => method,
            Verdict::UnknownUpToBounds { .. } => "",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ConsequenceError {
    #[error("formula `{0}` has free variables")]
    NotClosed(Formula),
    #[error("invalid parameter: {0}")]
    Parameter(#[from] Violation),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("model value {0} is not one of 0, 1/2, 1")]
    NotThreeValued(TruthValue),
    #[error("sorites chains need at least two terms, got {0}")]
    ShortChain(usize),
    #[error("epsilon must lie in (0,1], got {0}")]
    Epsilon(TruthValue),
    #[error("bounds must be positive")]
    Bounds,
}

/// The base predicates that can take part in the tolerance clause: unary
/// predicates that also have a similarity table.
fn tolerance_bases(m: &Model) -> Vec<&str> {
    m.sim_bases()
        .filter(|b| m.predicate(b).is_some_and(|t| t.arity == 1))
        .collect()
}

/// First pair of elements breaking the tolerance clause of `p`.
pub fn tolerance_violation(m: &Model, p: &Parameter) -> Option<(String, Element, Element)> {
    let n = m.domain_size();
    for base in tolerance_bases(m) {
        for d in 0..n {
            let pd = m.pred_value(base, &[d]).expect("unary table");
            if !p.in_t(pd) {
                continue;
            }
            for e in 0..n {
                let pe = m.pred_value(base, &[e]).expect("unary table");
                let sim = m.sim_value(base, d, e).expect("similarity table");
                if p.in_f(pe) && !p.in_f(sim) {
                    return Some((base.to_string(), d, e));
                }
            }
        }
    }
    None
}

/// Whether `m` is a countermodel to `s` under `p`: atom values in `V`,
/// premises in `T`, conclusions in `F`, and in tolerant mode the tolerance
/// clause for every pair of elements.
pub fn is_countermodel(m: &Model, s: &Sequent, p: &Parameter, mode: Mode) -> Result<bool, ConsequenceError> {
    if let Some(f) = s.formulas().find(|f| !f.is_closed()) {
        return Err(ConsequenceError::NotClosed(f.clone()));
    }
    if m.atom_values().any(|v| !p.v.contains(v)) {
        return Ok(false);
    }
    for f in &s.left {
        if !p.in_t(eval_closed(m, f)?) {
            return Ok(false);
        }
    }
    for f in &s.right {
        if !p.in_f(eval_closed(m, f)?) {
            return Ok(false);
        }
    }
    Ok(mode == Mode::Plain || tolerance_violation(m, p).is_none())
}

/// The three-valued restriction: `P` at 1 and 0 forces similarity 0.
pub fn satisfies_st_restriction(m: &Model) -> Result<bool, ConsequenceError> {
    if let Some(v) = m
        .atom_values()
        .find(|v| ![TruthValue::ZERO, TruthValue::HALF, TruthValue::ONE].contains(v))
    {
        return Err(ConsequenceError::NotThreeValued(v));
    }
    Ok(tolerance_violation(m, &Parameter::st()).is_none())
}

/// `P(t1), t1 ~P t2, ..., t(n-1) ~P tn |- P(tn)`.
pub fn sorites_sequent(pred: &str, n: usize) -> Result<Sequent, ConsequenceError> {
    if n < 2 {
        return Err(ConsequenceError::ShortChain(n));
    }
    let t = |i: usize| Term::constant(format!("t{i}"));
    let mut left = vec![Formula::pred(pred, [t(1)])];
    left.extend((1..n).map(|i| Formula::sim(pred, t(i), t(i + 1))));
    Ok(Sequent::new(left, [Formula::pred(pred, [t(n)])]))
}

/// Adds identity similarity (1 on the diagonal, 0 elsewhere) for every
/// unary predicate that has no similarity table yet.
pub fn identity_similarity_extension(m: &Model) -> Model {
    let n = m.domain_size();
    let missing: Vec<String> = m
        .predicates()
        .filter(|(name, t)| t.arity == 1 && m.sim_value(name, 0, 0).is_none())
        .map(|(name, _)| name.to_string())
        .collect();
    let mut out = m.clone();
    for base in missing {
        let table = (0..n * n)
            .map(|i| if i / n == i % n { TruthValue::ONE } else { TruthValue::ZERO })
            .collect();
        out = out.with_sim_table(base, table);
    }
    out
}

/// Two elements similar to degree 1 whose values differ too much.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityViolation {
    pub base: String,
    pub left: String,
    pub right: String,
    pub left_value: TruthValue,
    pub right_value: TruthValue,
}

impl fmt::Display for SimilarityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} ~{} {} but {}({}) = {} and {}({}) = {}",
            self.left,
            self.base,
            self.right,
            self.base,
            self.left,
            self.left_value,
            self.base,
            self.right,
            self.right_value
        )
    }
}

fn similar_pair_violation(
    m: &Model,
    mut too_far: impl FnMut(TruthValue, TruthValue) -> bool,
) -> Option<SimilarityViolation> {
    let n = m.domain_size();
    for base in tolerance_bases(m) {
        for d in 0..n {
            for e in d + 1..n {
                if m.sim_value(base, d, e) != Some(TruthValue::ONE) {
                    continue;
                }
                let a = m.pred_value(base, &[d]).expect("unary table");
                let b = m.pred_value(base, &[e]).expect("unary table");
                if too_far(a, b) {
                    return Some(SimilarityViolation {
                        base: base.to_string(),
                        left: m.domain()[d].clone(),
                        right: m.domain()[e].clone(),
                        left_value: a,
                        right_value: b,
                    });
                }
            }
        }
    }
    None
}

/// Smith-Tolerance: fully similar elements get equal values.
pub fn check_smith_tolerance(m: &Model) -> Option<SimilarityViolation> {
    similar_pair_violation(m, |a, b| a != b)
}

/// Closeness: fully similar elements get values at most `epsilon` apart.
pub fn check_closeness(m: &Model, epsilon: TruthValue) -> Result<Option<SimilarityViolation>, ConsequenceError> {
    if epsilon == TruthValue::ZERO {
        return Err(ConsequenceError::Epsilon(epsilon));
    }
    let eps = epsilon.ratio();
    Ok(similar_pair_violation(m, |a, b| {
        let gap = a.ratio() - b.ratio();
        gap > eps || -gap > eps
    }))
}
