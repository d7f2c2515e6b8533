//! Seeded generation of small quantifier-free sequents.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::syntax::{Formula, Sequent, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusConfig {
    /// Distinct atoms drawn per sequent, at least one.
    pub max_atoms: usize,
    pub max_constants: usize,
    /// Allow `t ~P u` atoms.
    pub similarity: bool,
    /// Formulas per side.
    pub max_side: usize,
    /// Connectives per formula.
    pub max_connectives: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            max_atoms: 4,
            max_constants: 3,
            similarity: true,
            max_side: 2,
            max_connectives: 3,
        }
    }
}

pub struct Generator {
    rng: ChaCha8Rng,
    config: CorpusConfig,
}

const CONSTANTS: [&str; 6] = ["a", "b", "c", "d", "e", "f"];

impl Generator {
    pub fn new(seed: u64, config: CorpusConfig) -> Generator {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            config,
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// A random pool of ground atoms over `P`, `Q` and, when allowed, `~P`.
    pub fn atom_pool(&mut self) -> Vec<Formula> {
        let k = self.rng.gen_range(1..=self.config.max_constants.clamp(1, CONSTANTS.len()));
        let consts: Vec<Term> = CONSTANTS[..k].iter().map(|c| Term::constant(*c)).collect();
        let mut candidates = Vec::new();
        for c in &consts {
            candidates.push(Formula::pred("P", [c.clone()]));
            candidates.push(Formula::pred("Q", [c.clone()]));
        }
        if self.config.similarity {
            for (i, c) in consts.iter().enumerate() {
                for d in &consts[i + 1..] {
                    candidates.push(Formula::sim("P", c.clone(), d.clone()));
                }
            }
        }
        candidates.shuffle(&mut self.rng);
        let m = self.rng.gen_range(1..=self.config.max_atoms.max(1));
        candidates.truncate(m);
        candidates
    }

    /// A formula over `atoms` with at most `connectives` connectives.
    pub fn formula(&mut self, atoms: &[Formula], connectives: usize) -> Formula {
        if connectives == 0 || self.rng.gen_bool(0.3) {
            return atoms.choose(&mut self.rng).expect("nonempty pool").clone();
        }
        let rest = connectives - 1;
        match self.rng.gen_range(0..4) {
            0 => Formula::not(self.formula(atoms, rest)),
            op => {
                let split = self.rng.gen_range(0..=rest);
                let a = self.formula(atoms, split);
                let b = self.formula(atoms, rest - split);
                match op {
                    1 => Formula::and(a, b),
                    2 => Formula::or(a, b),
                    _ => Formula::implies(a, b),
                }
            }
        }
    }

    /// Up to `max_side` random formulas over `atoms`.
    pub fn side(&mut self, atoms: &[Formula]) -> Vec<Formula> {
        let n = self.rng.gen_range(0..=self.config.max_side);
        (0..n)
            .map(|_| {
                let c = self.rng.gen_range(0..=self.config.max_connectives);
                self.formula(atoms, c)
            })
            .collect()
    }

    /// A nonempty random sequent.
    pub fn sequent(&mut self) -> Sequent {
        let atoms = self.atom_pool();
        loop {
            let s = Sequent::new(self.side(&atoms), self.side(&atoms));
            if s.formulas().next().is_some() {
                return s;
            }
        }
    }
}

/// `count` sequents from a seeded generator.
pub fn corpus(seed: u64, count: usize, config: CorpusConfig) -> Vec<Sequent> {
    let mut g = Generator::new(seed, config);
    (0..count).map(|_| g.sequent()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_and_bounded() {
        let a = corpus(7, 200, CorpusConfig::default());
        assert_eq!(a, corpus(7, 200, CorpusConfig::default()));
        assert_ne!(a, corpus(8, 200, CorpusConfig::default()));
        for s in &a {
            assert!(s.is_quantifier_free() && s.is_closed());
            assert!(s.atoms().len() <= 4);
            assert!(s.constants().len() <= 3);
        }
        assert!(a.iter().any(Sequent::contains_similarity));
    }

    #[test]
    fn similarity_can_be_switched_off() {
        let config = CorpusConfig {
            similarity: false,
            ..CorpusConfig::default()
        };
        assert!(corpus(1, 100, config).iter().all(|s| !s.contains_similarity()));
    }
}
