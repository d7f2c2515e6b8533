//! Proof trees for the ST~ sequent calculus, a node-by-node checker, a
//! bounded root-first prover and a text format for proofs.
//!
//! Sequent sides are sets, so a rule instance may keep its principal formula
//! in the context; the checker accepts both readings.

mod check;
mod format;
mod prove;

use crate::syntax::{Formula, RuleName, Sequent, Term};

pub use check::{check_proof, cut_node, CheckReport};
pub use format::{parse_proof, print_proof, ProofFormatError};
pub use prove::{prove, prove_with, ProveFailure, ProverConfig, RuleSet};

/// One inference: a conclusion, the rule applied, and the premise subproofs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofNode {
    pub conclusion: Sequent,
    pub rule: RuleName,
    pub premises: Vec<ProofNode>,
    /// The formula the rule acts on; for `Tol` the similarity atom of the
    /// premise, for `SimRef` the reflexive atom added on the left.
    pub principal: Option<Formula>,
    /// Instantiating term or eigenvariable for quantifier rules.
    pub term: Option<Term>,
}

impl ProofNode {
    pub fn leaf(conclusion: Sequent, rule: RuleName) -> ProofNode {
        ProofNode {
            conclusion,
            rule,
            premises: Vec::new(),
            principal: None,
            term: None,
        }
    }

    pub fn new(
        conclusion: Sequent,
        rule: RuleName,
        premises: Vec<ProofNode>,
        principal: Option<Formula>,
        term: Option<Term>,
    ) -> ProofNode {
        ProofNode {
            conclusion,
            rule,
            premises,
            principal,
            term,
        }
    }

    /// Height of the tree; a single leaf has height 1.
    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(ProofNode::height).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(ProofNode::size).sum::<usize>()
    }

    /// Every rule used anywhere in the tree.
    pub fn rules_used(&self) -> std::collections::BTreeSet<RuleName> {
        let mut out = std::collections::BTreeSet::from([self.rule]);
        for p in &self.premises {
            out.extend(p.rules_used());
        }
        out
    }
}
