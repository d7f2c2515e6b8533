//! Brute-force oracle for quantifier-free consequence over finite value
//! sets, written against the formula tree only.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tolerance_lab::consequence::{decide_with, is_countermodel, Mode, SearchBounds, Status};
use tolerance_lab::corpus::{corpus, CorpusConfig};
use tolerance_lab::parameter::parse_parameter;
use tolerance_lab::semantics::{Model, ModelBuilder, TruthValue};
use tolerance_lab::syntax::{parse_sequent, Atom, Formula, Sequent, Term};

/// A finite parameter on the scale `k / n`.
struct Scale {
    spec: &'static str,
    n: i64,
    t: fn(i64) -> bool,
    f: fn(i64) -> bool,
}

const SCALES: [Scale; 7] = [
    Scale { spec: "CLASSICAL", n: 1, t: |k| k == 1, f: |k| k == 0 },
    Scale { spec: "ST", n: 2, t: |k| k == 2, f: |k| k == 0 },
    Scale { spec: "VN(4)", n: 3, t: |k| k == 3, f: |k| k == 0 },
    Scale { spec: "VN(5)", n: 4, t: |k| k == 4, f: |k| k == 0 },
    Scale { spec: "DYADIC(2)", n: 4, t: |k| k >= 3, f: |k| k <= 1 },
    Scale { spec: "V={0,1/4,1/2,3/4,1} T={1} F={0,1/4}", n: 4, t: |k| k == 4, f: |k| k <= 1 },
    Scale { spec: "V={0,1/4,1/2,3/4,1} T={3/4,1} F={0}", n: 4, t: |k| k >= 3, f: |k| k == 0 },
];

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Cell {
    Pred(String, usize),
    Sim(usize, usize),
}

struct World<'a> {
    class: &'a BTreeMap<String, usize>,
    values: BTreeMap<Cell, i64>,
    n: i64,
}

impl World<'_> {
    fn term(&self, t: &Term) -> usize {
        match t {
            Term::Const(c) => self.class[c],
            Term::Var(v) => panic!("free variable {v}"),
        }
    }

    fn value(&self, f: &Formula) -> i64 {
        match f {
            Formula::Atom(Atom::Pred { name, args }) => self.values[&Cell::Pred(name.clone(), self.term(&args[0]))],
            Formula::Atom(Atom::Sim { left, right, .. }) => {
                let (l, r) = (self.term(left), self.term(right));
                if l == r {
                    self.n
                } else {
                    self.values[&Cell::Sim(l.min(r), l.max(r))]
                }
            }
            Formula::Not(a) => self.n - self.value(a),
            Formula::And(a, b) => self.value(a).min(self.value(b)),
            Formula::Or(a, b) => self.value(a).max(self.value(b)),
            Formula::Implies(a, b) => (self.n - self.value(a)).max(self.value(b)),
            Formula::Forall(..) | Formula::Exists(..) => panic!("quantifier-free input expected"),
        }
    }
}

fn atoms(f: &Formula, out: &mut Vec<Atom>) {
    match f {
        Formula::Atom(a) => out.push(a.clone()),
        Formula::Not(a) => atoms(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            atoms(a, out);
            atoms(b, out);
        }
        Formula::Forall(_, a) | Formula::Exists(_, a) => atoms(a, out),
    }
}

/// Restricted-growth strings: every way of identifying the constants.
fn partitions(k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                let next = p.iter().max().map_or(0, |m| m + 1);
                (0..=next).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

fn has_countermodel(s: &Sequent, sc: &Scale, tolerant: bool) -> bool {
    let consts: Vec<String> = s.constants().into_iter().collect();
    let mut all = Vec::new();
    for f in s.left.iter().chain(&s.right) {
        atoms(f, &mut all);
    }
    for p in partitions(consts.len()) {
        let class: BTreeMap<String, usize> = consts.iter().cloned().zip(p.iter().copied()).collect();
        let classes = p.iter().max().map_or(0, |m| m + 1);
        // Every P cell takes part in tolerance; other cells only where they occur.
        let mut cells: Vec<Cell> = (0..classes).map(|d| Cell::Pred("P".into(), d)).collect();
        for a in &all {
            let cell = match a {
                Atom::Pred { name, args } => match &args[0] {
                    Term::Const(c) => Cell::Pred(name.clone(), class[c]),
                    Term::Var(_) => unreachable!(),
                },
                Atom::Sim { left, right, .. } => {
                    let (l, r) = (class[left.name()], class[right.name()]);
                    if l == r {
                        continue;
                    }
                    Cell::Sim(l.min(r), l.max(r))
                }
            };
            if !cells.contains(&cell) {
                cells.push(cell);
            }
        }
        let mut digits = vec![0i64; cells.len()];
        loop {
            let world = World {
                class: &class,
                values: cells.iter().cloned().zip(digits.iter().copied()).collect(),
                n: sc.n,
            };
            let refutes = s.left.iter().all(|f| (sc.t)(world.value(f)))
                && s.right.iter().all(|f| (sc.f)(world.value(f)));
            // Absent similarity cells are set to 0, which always satisfies tolerance.
            let tolerates = !tolerant
                || (0..classes).all(|d| {
                    (0..classes).all(|e| {
                        let (pd, pe) = (world.values[&Cell::Pred("P".into(), d)], world.values[&Cell::Pred("P".into(), e)]);
                        if d == e || !((sc.t)(pd) && (sc.f)(pe)) {
                            return true;
                        }
                        world
                            .values
                            .get(&Cell::Sim(d.min(e), d.max(e)))
                            .is_none_or(|v| (sc.f)(*v))
                    })
                });
            if refutes && tolerates {
                return true;
            }
            let mut i = 0;
            loop {
                if i == digits.len() {
                    break;
                }
                digits[i] += 1;
                if digits[i] <= sc.n {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
            if i == digits.len() {
                break;
            }
        }
    }
    false
}

fn compare(sequents: &[Sequent]) {
    let bounds = SearchBounds::default();
    for sc in &SCALES {
        let p = parse_parameter(sc.spec).unwrap();
        for (mode, tolerant) in [(Mode::Plain, false), (Mode::Tolerant, true)] {
            for s in sequents {
                let expected = if has_countermodel(s, sc, tolerant) {
                    Status::Invalid
                } else {
                    Status::Valid
                };
                for fast in [false, true] {
                    let v = decide_with(s, &p, mode, &bounds, fast).unwrap();
                    assert_eq!(v.status(), expected, "{s} under {} ({mode}, fast path {fast})", sc.spec);
                }
            }
        }
    }
}

#[test]
fn agrees_with_brute_force_on_two_constants() {
    let config = CorpusConfig {
        max_atoms: 3,
        max_constants: 2,
        ..CorpusConfig::default()
    };
    compare(&corpus(2024, 120, config));
}

#[test]
fn agrees_with_brute_force_on_three_constants() {
    let config = CorpusConfig {
        max_atoms: 2,
        max_constants: 3,
        ..CorpusConfig::default()
    };
    compare(&corpus(77, 80, config));
}

#[test]
fn agrees_on_named_sequents() {
    let named: Vec<Sequent> = [
        "P(t1), t1 ~P t2, t2 ~P t3 |- P(t3)",
        "P(t1), t1 ~P t2 |- P(t2)",
        "P(a), b ~P a |- P(b)",
        "|- P(a) & a ~P b -> P(b)",
        "a ~P b, P(a) |- P(b), !P(a)",
        "P(a), a ~P b, !P(b) |-",
        "|- P(a), !P(a)",
        "P(a), !P(a) |-",
        "|- a ~P a",
    ]
    .iter()
    .map(|t| parse_sequent(t).unwrap())
    .collect();
    compare(&named);
}

/// A model naming each constant of `s` by its own element, with values
/// `k/d` for random `d <= 97`.
fn random_model(s: &Sequent, rng: &mut ChaCha8Rng) -> Model {
    let consts: Vec<String> = s.constants().into_iter().collect();
    let names: Vec<String> = (1..=consts.len().max(1)).map(|i| format!("d{i}")).collect();
    let v = |rng: &mut ChaCha8Rng| {
        let d = rng.gen_range(1..=97);
        TruthValue::of(rng.gen_range(0..=d), d)
    };
    let mut b = ModelBuilder::new(names.clone());
    for (c, d) in consts.iter().zip(&names) {
        b = b.constant(c, d).unwrap();
    }
    for (i, d) in names.iter().enumerate() {
        b = b.pred("P", &[d], v(rng)).unwrap().pred("Q", &[d], v(rng)).unwrap();
        for e in &names[i + 1..] {
            b = b.sim("P", d, e, v(rng)).unwrap();
        }
    }
    b.sim_base("P").build().unwrap()
}

#[test]
fn no_off_grid_countermodels_to_grid_valid_sequents() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sequents = corpus(31, 200, CorpusConfig::default());
    for spec in ["SMITH", "V=[0,1] T={1} F=[0,1/2)", "V=[0,1] T=[3/5,1] F=[0,2/5]"] {
        let p = parse_parameter(spec).unwrap();
        let mut valid = 0;
        for s in &sequents {
            let v = decide_with(s, &p, Mode::Tolerant, &SearchBounds::default(), false).unwrap();
            if !v.is_valid() {
                continue;
            }
            valid += 1;
            for _ in 0..200 {
                let m = random_model(s, &mut rng);
                assert!(!is_countermodel(&m, s, &p, Mode::Tolerant).unwrap(), "{s} under {spec}:\n{m}");
            }
        }
        assert!(valid > 20, "{spec}: only {valid} valid sequents");
    }
}
