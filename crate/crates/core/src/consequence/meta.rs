use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use super::{decide, ConsequenceError, Mode, SearchBounds, Status, Verdict};
use crate::corpus::{CorpusConfig, Generator};
use crate::parameter::Parameter;
use crate::semantics::Model;
use crate::syntax::{parse_sequent, Formula, RuleName, Sequent, Term};

/// A rule of the calculus, or Cut.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetaRule {
    Figure(RuleName),
    Cut,
}

impl MetaRule {
    pub fn from_name(name: &str) -> Option<MetaRule> {
        if name.eq_ignore_ascii_case("cut") {
            return Some(MetaRule::Cut);
        }
        RuleName::ALL
            .into_iter()
            .find(|r| r.as_str().eq_ignore_ascii_case(name))
            .map(MetaRule::Figure)
    }
}

impl fmt::Display for MetaRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetaRule::Figure(r) => write!(f, "{r}"),
            MetaRule::Cut => f.write_str("Cut"),
        }
    }
}

/// Premise sequents and the conclusion a rule draws from them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetaInstance {
    pub premises: Vec<Sequent>,
    pub conclusion: Sequent,
    /// `library` for the fixed instances, `random` otherwise.
    pub origin: &'static str,
}

impl fmt::Display for MetaInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let premises: Vec<String> = self.premises.iter().map(|s| format!("[{s}]")).collect();
        write!(f, "{} / [{}]", premises.join(" "), self.conclusion)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureReport {
    pub rule: MetaRule,
    /// Instances whose premises are all valid and whose conclusion was decided.
    pub checked: usize,
    /// Instances with an undecided premise or conclusion.
    pub skipped: usize,
    /// Instances with an invalid premise.
    pub discarded: usize,
    pub counterexample: Option<(MetaInstance, Model)>,
}

impl ClosureReport {
    pub fn holds(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn seq(text: &str) -> Sequent {
    parse_sequent(text).expect("library sequent")
}

fn library(premises: &[&str], conclusion: &str) -> MetaInstance {
    MetaInstance {
        premises: premises.iter().map(|s| seq(s)).collect(),
        conclusion: seq(conclusion),
        origin: "library",
    }
}

/// Fixed instances known to break the rule under some parameter.
pub fn library_instances(rule: MetaRule) -> Vec<MetaInstance> {
    use RuleName::*;
    match rule {
        MetaRule::Cut => vec![library(
            &["P(t1), t1 ~P t2 |- P(t2)", "P(t2), t2 ~P t3 |- P(t3)"],
            "P(t1), t1 ~P t2, t2 ~P t3 |- P(t3)",
        )],
        MetaRule::Figure(ImpR) => vec![library(
            &["P(a) & a ~P b |- P(b)"],
            "|- P(a) & a ~P b -> P(b)",
        )],
        MetaRule::Figure(NotR) => vec![library(&["a ~P b, P(a) |- P(b)"], "a ~P b |- P(b), !P(a)")],
        MetaRule::Figure(NotL) => vec![library(&["P(a), a ~P b |- P(b)"], "P(a), a ~P b, !P(b) |-")],
        MetaRule::Figure(ImpL) => vec![library(
            &["P(a), a ~P b |- P(b)", "P(a), a ~P b, !(a ~P a) |-"],
            "P(a), a ~P b, P(b) -> !(a ~P a) |-",
        )],
        MetaRule::Figure(ForallR) => vec![library(
            &["P(a), forall x. a ~P x |- P(b)"],
            "P(a), forall x. a ~P x |- forall y. P(y)",
        )],
        MetaRule::Figure(ExistsL) => vec![library(
            &["P(b), forall x. x ~P a |- P(a)"],
            "exists y. P(y), forall x. x ~P a |- P(a)",
        )],
        MetaRule::Figure(_) => vec![],
    }
}

fn sequent(left: &[Formula], right: &[Formula]) -> Sequent {
    Sequent::new(left.iter().cloned(), right.iter().cloned())
}

fn plus(base: &[Formula], extra: &[Formula]) -> Vec<Formula> {
    base.iter().chain(extra).cloned().collect()
}

/// A random instance of `rule`, or `None` when the draw does not fit the
/// rule's side conditions.
fn random_instance(g: &mut Generator, rule: MetaRule) -> Option<MetaInstance> {
    use RuleName::*;
    let atoms = g.atom_pool();
    let a = {
        let c = g.rng().gen_range(0..=2);
        g.formula(&atoms, c)
    };
    let b = {
        let c = g.rng().gen_range(0..=2);
        g.formula(&atoms, c)
    };
    let (gamma, delta) = (g.side(&atoms), g.side(&atoms));
    let t = Term::constant(*["a", "b"].choose(g.rng()).unwrap());
    let u = Term::constant(*["a", "b"].choose(g.rng()).unwrap());
    let (a1, b1) = (std::slice::from_ref(&a), std::slice::from_ref(&b));
    let (premises, conclusion) = match rule {
        MetaRule::Cut => (
            vec![sequent(&gamma, &plus(&delta, a1)), sequent(&plus(&gamma, a1), &delta)],
            sequent(&gamma, &delta),
        ),
        MetaRule::Figure(rule) => match rule {
            Id => (vec![], sequent(&plus(&gamma, a1), &plus(&delta, a1))),
            K => {
                let (g2, d2) = (g.side(&atoms), g.side(&atoms));
                (
                    vec![sequent(&gamma, &delta)],
                    sequent(&plus(&gamma, &g2), &plus(&delta, &d2)),
                )
            }
            NotL => (
                vec![sequent(&gamma, &plus(&delta, a1))],
                sequent(&plus(&gamma, &[Formula::not(a.clone())]), &delta),
            ),
            NotR => (
                vec![sequent(&plus(&gamma, a1), &delta)],
                sequent(&gamma, &plus(&delta, &[Formula::not(a.clone())])),
            ),
            AndL => (
                vec![sequent(&plus(&gamma, &[a.clone(), b.clone()]), &delta)],
                sequent(&plus(&gamma, &[Formula::and(a.clone(), b.clone())]), &delta),
            ),
            AndR => (
                vec![sequent(&gamma, &plus(&delta, a1)), sequent(&gamma, &plus(&delta, b1))],
                sequent(&gamma, &plus(&delta, &[Formula::and(a.clone(), b.clone())])),
            ),
            OrL => (
                vec![sequent(&plus(&gamma, a1), &delta), sequent(&plus(&gamma, b1), &delta)],
                sequent(&plus(&gamma, &[Formula::or(a.clone(), b.clone())]), &delta),
            ),
            OrR => (
                vec![sequent(&gamma, &plus(&delta, &[a.clone(), b.clone()]))],
                sequent(&gamma, &plus(&delta, &[Formula::or(a.clone(), b.clone())])),
            ),
            ImpL => (
                vec![sequent(&gamma, &plus(&delta, a1)), sequent(&plus(&gamma, b1), &delta)],
                sequent(&plus(&gamma, &[Formula::implies(a.clone(), b.clone())]), &delta),
            ),
            ImpR => (
                vec![sequent(&plus(&gamma, a1), &plus(&delta, b1))],
                sequent(&gamma, &plus(&delta, &[Formula::implies(a.clone(), b.clone())])),
            ),
            ForallL | ExistsR | ForallR | ExistsL => {
                let consts: Vec<String> = a.constants().into_iter().collect();
                let c = consts.choose(g.rng())?.clone();
                if rule.is_eigenvariable_rule()
                    && gamma.iter().chain(&delta).any(|f| f.constants().contains(&c))
                {
                    return None;
                }
                let body = a.abstract_constant(&c, "x");
                let on_left = matches!(rule, ForallL | ExistsL);
                let q = if matches!(rule, ForallL | ForallR) {
                    Formula::forall("x", body)
                } else {
                    Formula::exists("x", body)
                };
                if on_left {
                    (
                        vec![sequent(&plus(&gamma, a1), &delta)],
                        sequent(&plus(&gamma, &[q]), &delta),
                    )
                } else {
                    (
                        vec![sequent(&gamma, &plus(&delta, a1))],
                        sequent(&gamma, &plus(&delta, &[q])),
                    )
                }
            }
            SimRef => (
                vec![sequent(&plus(&gamma, &[Formula::sim("P", t.clone(), t.clone())]), &delta)],
                sequent(&gamma, &delta),
            ),
            SimSymL => (
                vec![sequent(&plus(&gamma, &[Formula::sim("P", u.clone(), t.clone())]), &delta)],
                sequent(&plus(&gamma, &[Formula::sim("P", t.clone(), u.clone())]), &delta),
            ),
            SimSymR => (
                vec![sequent(&gamma, &plus(&delta, &[Formula::sim("P", u.clone(), t.clone())]))],
                sequent(&gamma, &plus(&delta, &[Formula::sim("P", t.clone(), u.clone())])),
            ),
            Tol => (
                vec![sequent(&gamma, &plus(&delta, &[Formula::sim("P", t.clone(), u.clone())]))],
                sequent(
                    &plus(&gamma, &[Formula::pred("P", [t.clone()])]),
                    &plus(&delta, &[Formula::pred("P", [u.clone()])]),
                ),
            ),
        },
    };
    Some(MetaInstance {
        premises,
        conclusion,
        origin: "random",
    })
}

enum Outcome {
    Checked,
    Counterexample(Model),
    Skipped,
    Discarded,
}

fn evaluate(
    inst: &MetaInstance,
    p: &Parameter,
    mode: Mode,
    bounds: &SearchBounds,
) -> Result<Outcome, ConsequenceError> {
    let mut undecided = false;
    for premise in &inst.premises {
        match decide(premise, p, mode, bounds)?.status() {
            Status::Invalid => return Ok(Outcome::Discarded),
            Status::Unknown => undecided = true,
            Status::Valid => {}
        }
    }
    if undecided {
        return Ok(Outcome::Skipped);
    }
    Ok(match decide(&inst.conclusion, p, mode, bounds)? {
        Verdict::Valid { .. } => Outcome::Checked,
        Verdict::Invalid { countermodel, .. } => Outcome::Counterexample(countermodel),
        Verdict::UnknownUpToBounds { .. } => Outcome::Skipped,
    })
}

/// Tests whether consequence under `p` is closed under `rule`: the library
/// instances first, then random instances until `trials` of them had valid
/// premises and a decided conclusion, or two hundred times as many were drawn.
pub fn check_metainference_closure(
    rule: MetaRule,
    p: &Parameter,
    mode: Mode,
    trials: usize,
    bounds: &SearchBounds,
    seed: u64,
) -> Result<ClosureReport, ConsequenceError> {
    let mut report = ClosureReport {
        rule,
        checked: 0,
        skipped: 0,
        discarded: 0,
        counterexample: None,
    };
    let record = |inst: MetaInstance, outcome: Outcome, report: &mut ClosureReport| match outcome {
        Outcome::Checked => report.checked += 1,
        Outcome::Skipped => report.skipped += 1,
        Outcome::Discarded => report.discarded += 1,
        Outcome::Counterexample(m) => {
            report.checked += 1;
            report.counterexample = Some((inst, m));
        }
    };
    for inst in library_instances(rule) {
        let outcome = evaluate(&inst, p, mode, bounds)?;
        record(inst, outcome, &mut report);
        if !report.holds() {
            return Ok(report);
        }
    }
    let config = CorpusConfig {
        max_atoms: 3,
        max_constants: 2,
        similarity: true,
        max_side: 2,
        max_connectives: 2,
    };
    let mut g = Generator::new(seed, config);
    let mut drawn = 0;
    while report.checked < trials && drawn < trials.saturating_mul(200) {
        drawn += 1;
        let Some(inst) = random_instance(&mut g, rule) else {
            continue;
        };
        let outcome = evaluate(&inst, p, mode, bounds)?;
        record(inst, outcome, &mut report);
        if !report.holds() {
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parameter::parse_parameter;

    fn quick() -> SearchBounds {
        SearchBounds {
            max_domain: 2,
            ..SearchBounds::default()
        }
    }

    #[test]
    fn cut_fails_for_st() {
        let r = check_metainference_closure(MetaRule::Cut, &Parameter::st(), Mode::Tolerant, 20, &quick(), 1)
            .unwrap();
        let (inst, _) = r.counterexample.expect("cut should fail");
        assert_eq!(inst.origin, "library");
        assert_eq!(inst.conclusion, seq("P(t1), t1 ~P t2, t2 ~P t3 |- P(t3)"));
    }

    #[test]
    fn conditional_proof_fails_for_one_sided_parameter() {
        let asym = parse_parameter("V=[0,1] T={1} F=[0,1/2)").unwrap();
        let r = check_metainference_closure(MetaRule::Figure(RuleName::ImpR), &asym, Mode::Tolerant, 20, &quick(), 1)
            .unwrap();
        assert!(!r.holds());
    }

    #[test]
    fn and_left_holds() {
        let r = check_metainference_closure(MetaRule::Figure(RuleName::AndL), &Parameter::st(), Mode::Tolerant, 50, &quick(), 3)
            .unwrap();
        assert!(r.holds());
        assert!(r.checked >= 50, "{r:?}");
    }

    #[test]
    fn names() {
        assert_eq!(MetaRule::from_name("cut"), Some(MetaRule::Cut));
        assert_eq!(MetaRule::from_name("ImpR"), Some(MetaRule::Figure(RuleName::ImpR)));
        assert_eq!(MetaRule::from_name("nope"), None);
        assert_eq!(MetaRule::Figure(RuleName::Tol).to_string(), "Tol");
    }
}
