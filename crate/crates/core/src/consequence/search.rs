use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use super::{ConsequenceError, Mode, SearchBounds, Verdict};
use crate::calculus::{prove_with, ProverConfig, RuleSet};
use crate::parameter::Parameter;
use crate::semantics::{
    blank_model, eval_closed, signature_cells, AtomCell, Element, Model, TruthValue, ValueSet,
};
use crate::syntax::{Atom, Formula, RuleName, Sequent, Signature, Term};

/// Representative values for searching `[0,1]`: every zone boundary and
/// `atom_count` evenly spaced points inside each zone. The boundary set is
/// closed under `1 - x`, so the result is too. A finite `V` is returned as is.
pub fn zone_representatives(p: &Parameter, atom_count: usize) -> Vec<TruthValue> {
    if let ValueSet::Finite(vs) = &p.v {
        return vs.clone();
    }
    let mut bounds: BTreeSet<TruthValue> = [TruthValue::ZERO, TruthValue::HALF, TruthValue::ONE].into();
    for x in p.t.boundary_points().into_iter().chain(p.f.boundary_points()) {
        bounds.insert(x);
        bounds.insert(x.complement());
    }
    let sorted: Vec<TruthValue> = bounds.iter().copied().collect();
    let mut out = bounds;
    let k = atom_count as i64;
    for pair in sorted.windows(2) {
        let (a, b) = (pair[0].ratio(), pair[1].ratio());
        for i in 1..=k {
            let x = a + (b - a) * num_rational::Ratio::new(i, k + 1);
            out.insert(TruthValue::from_ratio(x).expect("between two values in [0,1]"));
        }
    }
    out.into_iter().collect()
}

/// The values model search draws atom values from.
pub fn value_grid(p: &Parameter, values_per_zone: usize) -> Vec<TruthValue> {
    zone_representatives(p, values_per_zone)
}

fn describe(grid: &[TruthValue]) -> String {
    let items: Vec<String> = grid.iter().map(ToString::to_string).collect();
    format!("{{{}}}", items.join(","))
}

/// Rules of the calculus that preserve validity under `p` in `mode`.
pub fn sound_rules(p: &Parameter, mode: Mode) -> RuleSet {
    use RuleName::*;
    let mut rules: RuleSet = [
        Id, K, AndL, AndR, OrL, OrR, ForallL, ExistsR, SimRef, SimSymL, SimSymR,
    ]
    .into();
    if mode == Mode::Tolerant {
        rules.insert(Tol);
    }
    if p.t_mirror_witness().is_none() {
        rules.extend([NotL, ImpL]);
    }
    if p.f_mirror_witness().is_none() {
        rules.extend([NotR, ImpR]);
    }
    if p.is_open() {
        rules.extend([ForallR, ExistsL]);
    }
    rules
}

enum Check<'a> {
    Premise(&'a Formula),
    Conclusion(&'a Formula),
    Tolerance { base: &'a str, d: Element, e: Element },
}

struct Backtrack<'a> {
    model: Model,
    cells: Vec<AtomCell>,
    values: &'a [TruthValue],
    /// `buckets[i]` holds the checks whose last dependency is cell `i`.
    buckets: Vec<Vec<Check<'a>>>,
    p: &'a Parameter,
    deadline: Instant,
    steps: u64,
    timed_out: bool,
}

impl Backtrack<'_> {
    fn passes(&self, check: &Check<'_>) -> bool {
        let m = &self.model;
        match check {
            Check::Premise(f) => eval_closed(m, f).is_ok_and(|v| self.p.in_t(v)),
            Check::Conclusion(f) => eval_closed(m, f).is_ok_and(|v| self.p.in_f(v)),
            Check::Tolerance { base, d, e } => {
                let pd = m.pred_value(base, &[*d]).expect("unary table");
                let pe = m.pred_value(base, &[*e]).expect("unary table");
                !(self.p.in_t(pd) && self.p.in_f(pe))
                    || self.p.in_f(m.sim_value(base, *d, *e).expect("similarity table"))
            }
        }
    }

    fn run(&mut self, i: usize) -> bool {
        if i == self.cells.len() {
            return true;
        }
        for k in 0..self.values.len() {
            self.steps += 1;
            if self.steps.is_multiple_of(4096) && Instant::now() >= self.deadline {
                self.timed_out = true;
            }
            if self.timed_out {
                return false;
            }
            let cell = self.cells[i].clone();
            self.model.set_cell(&cell, self.values[k]);
            if self.buckets[i].iter().all(|c| self.passes(c)) && self.run(i + 1) {
                return true;
            }
        }
        false
    }
}

/// Searches one constant placement. Each check comes with the cell
/// indices it reads; checks that read no cell are evaluated up front.
fn search_placement<'a>(
    model: Model,
    cells: Vec<AtomCell>,
    checks: Vec<(Check<'a>, Vec<usize>)>,
    values: &'a [TruthValue],
    p: &'a Parameter,
    deadline: Instant,
) -> (Option<Model>, bool) {
    let mut buckets: Vec<Vec<Check<'a>>> = (0..cells.len()).map(|_| Vec::new()).collect();
    let mut upfront = Vec::new();
    for (check, deps) in checks {
        match deps.into_iter().max() {
            Some(last) => buckets[last].push(check),
            None => upfront.push(check),
        }
    }
    let mut bt = Backtrack {
        model,
        cells,
        values,
        buckets: Vec::new(),
        p,
        deadline,
        steps: 0,
        timed_out: false,
    };
    if !bt.cells.is_empty() {
        let first = values[0];
        for cell in bt.cells.clone() {
            bt.model.set_cell(&cell, first);
        }
    }
    if !upfront.iter().all(|c| bt.passes(c)) {
        return (None, false);
    }
    bt.buckets = buckets;
    if bt.run(0) {
        (Some(bt.model), false)
    } else {
        (None, bt.timed_out)
    }
}

fn tolerance_bases(sig: &Signature) -> Vec<&str> {
    sig.sim_bases
        .iter()
        .filter(|b| sig.predicates.get(*b) == Some(&1))
        .map(String::as_str)
        .collect()
}

fn check_closed(s: &Sequent) -> Result<(), ConsequenceError> {
    match s.formulas().find(|f| !f.is_closed()) {
        Some(f) => Err(ConsequenceError::NotClosed(f.clone())),
        None => Ok(()),
    }
}

fn sequent_checks(s: &Sequent) -> Vec<Check<'_>> {
    s.left
        .iter()
        .map(Check::Premise)
        .chain(s.right.iter().map(Check::Conclusion))
        .collect()
}

fn ground_cell(atom: &Atom, consts: &BTreeMap<String, Element>) -> Option<AtomCell> {
    let den = |t: &Term| consts[t.name()];
    match atom {
        Atom::Pred { name, args } => Some(AtomCell::Pred {
            name: name.clone(),
            tuple: args.iter().map(den).collect(),
        }),
        Atom::Sim { base, left, right } => {
            let (l, r) = (den(left), den(right));
            (l != r).then(|| AtomCell::Sim {
                base: base.clone(),
                left: l.min(r),
                right: l.max(r),
            })
        }
    }
}

/// Exhaustive search for quantifier-free sequents: one element per
/// constant, only the cells the sequent and the tolerance clause read.
fn search_qf(
    s: &Sequent,
    p: &Parameter,
    mode: Mode,
    grid: &[TruthValue],
    deadline: Instant,
) -> (Option<Model>, bool) {
    let sig = s.signature();
    let consts: BTreeMap<String, Element> = sig
        .constants
        .iter()
        .enumerate()
        .map(|(i, c)| (c.clone(), i))
        .collect();
    let n = consts.len().max(1);
    let model = blank_model(&sig, n, consts.clone(), TruthValue::ZERO, TruthValue::ZERO);

    let mut cells: Vec<AtomCell> = Vec::new();
    let index = |cell: AtomCell, cells: &mut Vec<AtomCell>| match cells.iter().position(|c| *c == cell) {
        Some(i) => i,
        None => {
            cells.push(cell);
            cells.len() - 1
        }
    };
    let mut checks = Vec::new();
    for check in sequent_checks(s) {
        let f = match &check {
            Check::Premise(f) | Check::Conclusion(f) => *f,
            Check::Tolerance { .. } => unreachable!(),
        };
        let mut deps = Vec::new();
        f.visit_atoms(&mut |a| {
            if let Some(cell) = ground_cell(a, &consts) {
                deps.push(index(cell, &mut cells));
            }
        });
        checks.push((check, deps));
    }
    if mode == Mode::Tolerant {
        for base in tolerance_bases(&sig) {
            for d in 0..n {
                for e in 0..n {
                    if d == e {
                        continue;
                    }
                    let mut deps = vec![
                        index(AtomCell::Pred { name: base.into(), tuple: vec![d] }, &mut cells),
                        index(AtomCell::Pred { name: base.into(), tuple: vec![e] }, &mut cells),
                    ];
                    let sim = AtomCell::Sim {
                        base: base.into(),
                        left: d.min(e),
                        right: d.max(e),
                    };
                    if let Some(i) = cells.iter().position(|c| *c == sim) {
                        deps.push(i);
                    }
                    checks.push((Check::Tolerance { base, d, e }, deps));
                }
            }
        }
    }
    search_placement(model, cells, checks, grid, p, deadline)
}

/// Restricted-growth strings: every placement of `k` constants into at
/// most `n` elements, up to renaming of elements.
fn placements(k: usize, n: usize) -> Vec<Vec<Element>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(k: usize, n: usize, used: usize, cur: &mut Vec<Element>, out: &mut Vec<Vec<Element>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for e in 0..(used + 1).min(n) {
            cur.push(e);
            go(k, n, used.max(e + 1), cur, out);
            cur.pop();
        }
    }
    go(k, n, 0, &mut cur, &mut out);
    out
}

/// Bounded search over every domain size up to the bound and every cell.
fn search_quantified(
    s: &Sequent,
    p: &Parameter,
    mode: Mode,
    grid: &[TruthValue],
    max_domain: usize,
    deadline: Instant,
) -> (Option<Model>, bool) {
    let sig = s.signature();
    let names: Vec<String> = sig.constants.iter().cloned().collect();
    for n in 1..=max_domain {
        let cells = signature_cells(&sig, n, true);
        for placement in placements(names.len(), n) {
            let consts: BTreeMap<String, Element> = names.iter().cloned().zip(placement).collect();
            let model = blank_model(&sig, n, consts, TruthValue::ZERO, TruthValue::ZERO);
            let mut checks = Vec::new();
            for check in sequent_checks(s) {
                let f = match &check {
                    Check::Premise(f) | Check::Conclusion(f) => *f,
                    Check::Tolerance { .. } => unreachable!(),
                };
                let mut preds = BTreeSet::new();
                let mut bases = BTreeSet::new();
                f.visit_atoms(&mut |a| match a {
                    Atom::Pred { name, .. } => {
                        preds.insert(name.as_str());
                    }
                    Atom::Sim { base, .. } => {
                        bases.insert(base.as_str());
                    }
                });
                let deps = cells
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| match c {
                        AtomCell::Pred { name, .. } => preds.contains(name.as_str()),
                        AtomCell::Sim { base, .. } => bases.contains(base.as_str()),
                    })
                    .map(|(i, _)| i)
                    .collect();
                checks.push((check, deps));
            }
            if mode == Mode::Tolerant {
                for base in tolerance_bases(&sig) {
                    for d in 0..n {
                        for e in 0..n {
                            if d == e {
                                continue;
                            }
                            let deps = cells
                                .iter()
                                .enumerate()
                                .filter(|(_, c)| match c {
                                    AtomCell::Pred { name, tuple } => {
                                        name == base && (tuple[0] == d || tuple[0] == e)
                                    }
                                    AtomCell::Sim { base: b, left, right } => {
                                        b == base && *left == d.min(e) && *right == d.max(e)
                                    }
                                })
                                .map(|(i, _)| i)
                                .collect();
                            checks.push((Check::Tolerance { base, d, e }, deps));
                        }
                    }
                }
            }
            let (found, timed_out) = search_placement(model, cells.clone(), checks, grid, p, deadline);
            if found.is_some() || timed_out {
                return (found, timed_out);
            }
        }
    }
    (None, false)
}

/// Looks for a countermodel to `s` under `p` with atom values from `V`
/// (finite) or the zone grid (interval). Quantifier-free sequents are
/// settled exhaustively; quantified ones are Invalid or unknown.
pub fn find_countermodel(
    s: &Sequent,
    p: &Parameter,
    mode: Mode,
    bounds: &SearchBounds,
) -> Result<Verdict, ConsequenceError> {
    check_closed(s)?;
    p.validate()?;
    if bounds.max_domain == 0 || bounds.values_per_zone == 0 {
        return Err(ConsequenceError::Bounds);
    }
    let grid = value_grid(p, bounds.values_per_zone);
    let start = Instant::now();
    let deadline = start + bounds.timeout;
    let qf = s.is_quantifier_free();
    let (found, timed_out) = if qf {
        search_qf(s, p, mode, &grid, deadline)
    } else {
        search_quantified(s, p, mode, &grid, bounds.max_domain, deadline)
    };
    Ok(match found {
        Some(countermodel) => Verdict::Invalid {
            countermodel,
            method: if qf { "exhaustive-qf" } else { "bounded-search" }.into(),
        },
        None if qf && !timed_out => Verdict::Valid {
            method: "exhaustive-qf".into(),
        },
        None => Verdict::UnknownUpToBounds {
            domain_bound: if qf { s.constants().len().max(1) } else { bounds.max_domain },
            value_grid: describe(&grid),
            elapsed: timed_out.then(|| start.elapsed()),
        },
    })
}

/// Rewrites every atom value at 1/2 to `w`.
fn relabel_half(m: &Model, w: TruthValue) -> Model {
    let mut out = m.clone();
    let (preds, sims) = out.tables_mut();
    let swap = |v: &mut TruthValue| {
        if *v == TruthValue::HALF {
            *v = w;
        }
    };
    preds.values_mut().for_each(|t| t.values.iter_mut().for_each(swap));
    sims.values_mut().for_each(|t| t.iter_mut().for_each(swap));
    out
}

/// [`decide_with`] with the structural fast paths enabled.
pub fn decide(s: &Sequent, p: &Parameter, mode: Mode, bounds: &SearchBounds) -> Result<Verdict, ConsequenceError> {
    decide_with(s, p, mode, bounds, true)
}

/// Decides `s` under `p`. With `fast_path`, plain consequence is decided
/// classically and tolerant consequence for proper symmetric open
/// parameters is decided as ST; countermodels found that way are mapped
/// back to countermodels under `p`. Quantified sequents are first handed to
/// the prover restricted to the rules sound for the target parameter.
pub fn decide_with(
    s: &Sequent,
    p: &Parameter,
    mode: Mode,
    bounds: &SearchBounds,
    fast_path: bool,
) -> Result<Verdict, ConsequenceError> {
    check_closed(s)?;
    p.validate()?;
    let profile = p.profile();
    let (route, target) = if fast_path && mode == Mode::Plain {
        ("paraclassical", Parameter::classical())
    } else if fast_path && profile.collapses_to_st() {
        ("soparast", Parameter::st())
    } else {
        ("direct", p.clone())
    };
    if !s.is_quantifier_free() {
        let config = ProverConfig::new(bounds.proof_depth, bounds.term_pool_extra)
            .with_rules(sound_rules(&target, mode));
        if prove_with(s, &config).is_ok() {
            return Ok(Verdict::Valid {
                method: format!("{route}/calculus"),
            });
        }
    }
    Ok(match find_countermodel(s, &target, mode, bounds)? {
        Verdict::Valid { method } => Verdict::Valid {
            method: format!("{route}/{method}"),
        },
        Verdict::Invalid { countermodel, method } => {
            let countermodel = match route {
                "soparast" => relabel_half(
                    &countermodel,
                    profile.proper.expect("proper parameters have a witness"),
                ),
                _ => countermodel,
            };
            Verdict::Invalid {
                countermodel,
                method: format!("{route}/{method}"),
            }
        }
        unknown => unknown,
    })
}
