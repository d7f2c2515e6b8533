use std::collections::BTreeSet;

use thiserror::Error;

use super::ProofNode;
use crate::syntax::{Atom, Formula, RuleName, Sequent, Term, EIGEN_PREFIX};

pub type RuleSet = BTreeSet<RuleName>;

/// Bounds and permitted rules for root-first search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverConfig {
    /// Maximum proof height.
    pub depth: usize,
    /// Fresh constants that quantifier instantiation may invent per branch.
    pub term_pool_extra: usize,
    pub rules: RuleSet,
    /// Node budget for the whole search.
    pub max_nodes: usize,
}

impl ProverConfig {
    pub fn new(depth: usize, term_pool_extra: usize) -> ProverConfig {
        ProverConfig {
            depth,
            term_pool_extra,
            rules: RuleName::ALL.into_iter().collect(),
            max_nodes: 200_000,
        }
    }

    pub fn with_rules(mut self, rules: RuleSet) -> ProverConfig {
        self.rules = rules;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProveFailure {
    #[error("no proof within depth {depth} ({nodes} nodes explored)")]
    DepthExhausted { depth: usize, nodes: usize },
    #[error("no rule applies to {stuck} ({nodes} nodes explored)")]
    Stuck { stuck: Sequent, nodes: usize },
    #[error("node budget of {nodes} exhausted")]
    Budget { nodes: usize },
}

/// Searches for a proof using every rule of the calculus.
pub fn prove(s: &Sequent, depth: usize, term_pool_extra: usize) -> Result<ProofNode, ProveFailure> {
    prove_with(s, &ProverConfig::new(depth, term_pool_extra))
}

/// Root-first search. Propositional and eigenvariable rules are applied
/// eagerly and drop their principal formula; quantifier instantiation,
/// `Tol` and the similarity rules keep it, so every step only adds
/// information and no backtracking is needed.
pub fn prove_with(s: &Sequent, config: &ProverConfig) -> Result<ProofNode, ProveFailure> {
    let mut prover = Prover {
        config,
        nodes: 0,
        depth_hit: false,
        instances: BTreeSet::new(),
    };
    prover
        .search(s.clone(), config.depth, 0)
        .map_err(|stuck| prover.failure(stuck))
}

struct Prover<'a> {
    config: &'a ProverConfig,
    nodes: usize,
    depth_hit: bool,
    /// Instantiations made on the current branch.
    instances: BTreeSet<(Formula, Term)>,
}

enum Fail {
    Depth,
    Budget,
    Stuck(Sequent),
}

fn fresh_constant(s: &Sequent) -> Term {
    let used = s.constants();
    (0..)
        .map(|k| format!("{EIGEN_PREFIX}e{k}"))
        .find(|name| !used.contains(name))
        .map(Term::Const)
        .expect("unbounded supply")
}

fn with_left(s: &Sequent, fs: impl IntoIterator<Item = Formula>) -> Sequent {
    let mut out = s.clone();
    out.left.extend(fs);
    out
}

fn with_right(s: &Sequent, fs: impl IntoIterator<Item = Formula>) -> Sequent {
    let mut out = s.clone();
    out.right.extend(fs);
    out
}

fn unary_const(f: &Formula) -> Option<(&str, &Term)> {
    match f {
        Formula::Atom(Atom::Pred { name, args }) if args.len() == 1 && args[0].is_constant() => {
            Some((name, &args[0]))
        }
        _ => None,
    }
}

impl Prover<'_> {
    fn failure(&self, fail: Fail) -> ProveFailure {
        match fail {
            Fail::Budget => ProveFailure::Budget { nodes: self.nodes },
            Fail::Stuck(_) | Fail::Depth if self.depth_hit => ProveFailure::DepthExhausted {
                depth: self.config.depth,
                nodes: self.nodes,
            },
            Fail::Stuck(stuck) => ProveFailure::Stuck {
                stuck,
                nodes: self.nodes,
            },
            Fail::Depth => ProveFailure::DepthExhausted {
                depth: self.config.depth,
                nodes: self.nodes,
            },
        }
    }

    fn allows(&self, rule: RuleName) -> bool {
        self.config.rules.contains(&rule)
    }

    fn id_leaf(&self, s: &Sequent) -> Option<ProofNode> {
        if !self.allows(RuleName::Id) {
            return None;
        }
        s.left
            .intersection(&s.right)
            .next()
            .map(|_| ProofNode::leaf(s.clone(), RuleName::Id))
    }

    fn search(&mut self, s: Sequent, depth: usize, extra_used: usize) -> Result<ProofNode, Fail> {
        self.nodes += 1;
        if self.nodes > self.config.max_nodes {
            return Err(Fail::Budget);
        }
        if let Some(leaf) = self.id_leaf(&s) {
            return Ok(leaf);
        }
        if depth <= 1 {
            self.depth_hit = true;
            return Err(Fail::Depth);
        }
        if let Some(node) = self.closing_step(&s, depth) {
            return Ok(node);
        }
        if let Some(step) = self.decompose(&s, depth, extra_used) {
            return step;
        }
        if let Some(step) = self.instantiate(&s, depth, extra_used) {
            return step;
        }
        Err(Fail::Stuck(s))
    }

    /// Atomic steps that close the branch immediately: reflexivity on the
    /// right, a flipped similarity, or a tolerance step backed by a
    /// similarity atom on the left.
    fn closing_step(&self, s: &Sequent, depth: usize) -> Option<ProofNode> {
        if !self.allows(RuleName::Id) {
            return None;
        }
        for f in &s.right {
            let Formula::Atom(Atom::Sim { base, left, right }) = f else {
                continue;
            };
            if left == right && self.allows(RuleName::SimRef) {
                let premise = with_left(s, [f.clone()]);
                return Some(ProofNode::new(
                    s.clone(),
                    RuleName::SimRef,
                    vec![ProofNode::leaf(premise, RuleName::Id)],
                    Some(f.clone()),
                    None,
                ));
            }
            let flipped = Formula::sim(base, right.clone(), left.clone());
            if s.left.contains(&flipped) && self.allows(RuleName::SimSymR) {
                return Some(self.sym_right(s, f, flipped));
            }
        }
        if !self.allows(RuleName::Tol) {
            return None;
        }
        for pt in &s.left {
            let Some((p, t)) = unary_const(pt) else { continue };
            for pu in &s.right {
                let Some((q, u)) = unary_const(pu) else { continue };
                if p != q || t == u {
                    continue;
                }
                let sim = Formula::sim(p, t.clone(), u.clone());
                let flipped = Formula::sim(p, u.clone(), t.clone());
                let premise = with_right(s, [sim.clone()]);
                let above = if s.left.contains(&sim) {
                    ProofNode::leaf(premise, RuleName::Id)
                } else if s.left.contains(&flipped) && self.allows(RuleName::SimSymR) && depth >= 3 {
                    self.sym_right(&premise, &sim, flipped)
                } else {
                    continue;
                };
                return Some(ProofNode::new(
                    s.clone(),
                    RuleName::Tol,
                    vec![above],
                    Some(sim),
                    None,
                ));
            }
        }
        None
    }

    fn sym_right(&self, s: &Sequent, target: &Formula, flipped: Formula) -> ProofNode {
        let premise = with_right(s, [flipped]);
        ProofNode::new(
            s.clone(),
            RuleName::SimSymR,
            vec![ProofNode::leaf(premise, RuleName::Id)],
            Some(target.clone()),
            None,
        )
    }

    /// Applies the first invertible rule available, preferring rules with
    /// one premise.
    fn decompose(
        &mut self,
        s: &Sequent,
        depth: usize,
        extra_used: usize,
    ) -> Option<Result<ProofNode, Fail>> {
        for branching in [false, true] {
            for on_left in [true, false] {
                let side = if on_left { &s.left } else { &s.right };
                for f in side {
                    let Some((rule, premises, term)) = self.expand(s, f, on_left) else {
                        continue;
                    };
                    if (premises.len() == 2) != branching || !self.allows(rule) {
                        continue;
                    }
                    return Some(self.build(s, rule, f, term, premises, depth, extra_used));
                }
            }
        }
        None
    }

    #[allow(clippy::too_many_arguments)]
    fn build(
        &mut self,
        s: &Sequent,
        rule: RuleName,
        principal: &Formula,
        term: Option<Term>,
        premises: Vec<Sequent>,
        depth: usize,
        extra_used: usize,
    ) -> Result<ProofNode, Fail> {
        let mut children = Vec::with_capacity(premises.len());
        for p in premises {
            children.push(self.search(p, depth - 1, extra_used)?);
        }
        Ok(ProofNode::new(
            s.clone(),
            rule,
            children,
            Some(principal.clone()),
            term,
        ))
    }

    /// Premises of the invertible rule for `f`, with its principal removed.
    fn expand(&self, s: &Sequent, f: &Formula, on_left: bool) -> Option<(RuleName, Vec<Sequent>, Option<Term>)> {
        let mut ctx = s.clone();
        if on_left {
            ctx.left.remove(f);
        } else {
            ctx.right.remove(f);
        }
        let l = |fs: Vec<Formula>| with_left(&ctx, fs);
        let r = |fs: Vec<Formula>| with_right(&ctx, fs);
        Some(match (f, on_left) {
            (Formula::Atom(_), _) => return None,
            (Formula::Not(a), true) => (RuleName::NotL, vec![r(vec![(**a).clone()])], None),
            (Formula::Not(a), false) => (RuleName::NotR, vec![l(vec![(**a).clone()])], None),
            (Formula::And(a, b), true) => (
                RuleName::AndL,
                vec![l(vec![(**a).clone(), (**b).clone()])],
                None,
            ),
            (Formula::And(a, b), false) => (
                RuleName::AndR,
                vec![r(vec![(**a).clone()]), r(vec![(**b).clone()])],
                None,
            ),
            (Formula::Or(a, b), true) => (
                RuleName::OrL,
                vec![l(vec![(**a).clone()]), l(vec![(**b).clone()])],
                None,
            ),
            (Formula::Or(a, b), false) => (
                RuleName::OrR,
                vec![r(vec![(**a).clone(), (**b).clone()])],
                None,
            ),
            (Formula::Implies(a, b), true) => (
                RuleName::ImpL,
                vec![r(vec![(**a).clone()]), l(vec![(**b).clone()])],
                None,
            ),
            (Formula::Implies(a, b), false) => {
                let mut p = l(vec![(**a).clone()]);
                p.right.insert((**b).clone());
                (RuleName::ImpR, vec![p], None)
            }
            (Formula::Forall(v, body), false) => {
                let a = fresh_constant(s);
                (RuleName::ForallR, vec![r(vec![body.substitute(v, &a)])], Some(a))
            }
            (Formula::Exists(v, body), true) => {
                let a = fresh_constant(s);
                (RuleName::ExistsL, vec![l(vec![body.substitute(v, &a)])], Some(a))
            }
            (Formula::Forall(..), true) | (Formula::Exists(..), false) => return None,
        })
    }

    /// One instantiation of a universal on the left or an existential on
    /// the right, keeping the quantified formula.
    fn instantiate(
        &mut self,
        s: &Sequent,
        depth: usize,
        extra_used: usize,
    ) -> Option<Result<ProofNode, Fail>> {
        let constants = s.constants();
        let mut pool: Vec<(Term, bool)> = constants
            .iter()
            .map(|c| (Term::constant(c.clone()), false))
            .collect();
        if constants.is_empty() || extra_used < self.config.term_pool_extra {
            pool.push((fresh_constant(s), true));
        }
        for (term, fresh) in &pool {
            for on_left in [true, false] {
                let (side, rule) = if on_left {
                    (&s.left, RuleName::ForallL)
                } else {
                    (&s.right, RuleName::ExistsR)
                };
                if !self.allows(rule) {
                    continue;
                }
                for f in side {
                    let (v, body) = match (f, on_left) {
                        (Formula::Forall(v, b), true) | (Formula::Exists(v, b), false) => (v, b),
                        _ => continue,
                    };
                    let key = (f.clone(), term.clone());
                    if self.instances.contains(&key) {
                        continue;
                    }
                    let instance = body.substitute(v, term);
                    let premise = if on_left {
                        with_left(s, [instance])
                    } else {
                        with_right(s, [instance])
                    };
                    let used = extra_used + usize::from(*fresh);
                    self.instances.insert(key.clone());
                    let result = self.search(premise, depth - 1, used);
                    self.instances.remove(&key);
                    return Some(result.map(|child| {
                        ProofNode::new(
                            s.clone(),
                            rule,
                            vec![child],
                            Some(f.clone()),
                            Some(term.clone()),
                        )
                    }));
                }
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calculus::check_proof;
    use crate::syntax::parse_sequent;

    fn proves(text: &str) -> ProofNode {
        let s = parse_sequent(text).unwrap();
        let proof = prove(&s, 20, 1).unwrap_or_else(|e| panic!("{text}: {e}"));
        assert_eq!(proof.conclusion, s);
        let report = check_proof(&proof);
        assert!(report.ok, "{text}: {report:?}");
        proof
    }

    #[test]
    fn excluded_middle() {
        let p = proves("|- P(a) | !P(a)");
        assert_eq!(
            p.rules_used(),
            [RuleName::OrR, RuleName::NotR, RuleName::Id].into()
        );
    }

    #[test]
    fn tolerance_as_argument() {
        let p = proves("P(a), a ~P b |- P(b)");
        assert_eq!(p.rule, RuleName::Tol);
    }

    #[test]
    fn tolerance_as_conditional() {
        let p = proves("|- forall x. forall y. (P(x) & x ~P y -> P(y))");
        let used = p.rules_used();
        for r in [
            RuleName::ForallR,
            RuleName::ImpR,
            RuleName::AndL,
            RuleName::Tol,
            RuleName::Id,
        ] {
            assert!(used.contains(&r), "{r}");
        }
    }

    #[test]
    fn flipped_similarity_and_reflexivity() {
        proves("b ~P a, P(a) |- P(b)");
        proves("|- a ~P a");
        proves("a ~P b |- b ~P a");
    }

    #[test]
    fn quantifier_instantiation() {
        proves("forall x. P(x) |- P(a)");
        proves("forall x. P(x) |- exists y. P(y)");
        proves("exists x. P(x), forall y. (P(y) -> Q(y)) |- exists z. Q(z)");
    }

    #[test]
    fn sorites_chain_fails() {
        let s = parse_sequent("P(t1), t1 ~P t2, t2 ~P t3 |- P(t3)").unwrap();
        for depth in [1, 5, 20, 40] {
            assert!(prove(&s, depth, 1).is_err());
        }
    }

    #[test]
    fn without_tol_tolerance_is_unprovable() {
        let s = parse_sequent("P(a), a ~P b |- P(b)").unwrap();
        let mut rules: RuleSet = RuleName::ALL.into_iter().collect();
        rules.remove(&RuleName::Tol);
        let config = ProverConfig::new(20, 1).with_rules(rules);
        assert!(matches!(
            prove_with(&s, &config),
            Err(ProveFailure::Stuck { .. })
        ));
    }

    #[test]
    fn unprovable_quantified_sequent_exhausts_depth() {
        let s = parse_sequent("exists x. P(x) |- forall y. P(y)").unwrap();
        assert!(matches!(
            prove(&s, 10, 2),
            Err(ProveFailure::DepthExhausted { .. }) | Err(ProveFailure::Stuck { .. })
        ));
    }
}
