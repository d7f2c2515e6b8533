//! The ten acceptance checks, runnable from the suite command and from the
//! acceptance tests.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use tolerance_lab::calculus::{check_proof, prove};
use tolerance_lab::consequence::{
    check_metainference_closure, decide_with, is_countermodel, sorites_sequent, ClosureReport,
    MetaRule, Mode, SearchBounds, Status, Verdict,
};
use tolerance_lab::corpus::{corpus, CorpusConfig, Generator};
use tolerance_lab::parameter::{parse_parameter, Parameter};
use tolerance_lab::semantics::{crispify, eval_closed, Model, ModelBuilder, TruthValue, ValueSet};
use tolerance_lab::syntax::{parse_sequent, Formula, RuleName, Sequent, Term};

pub const DEFAULT_SEED: u64 = 0x5_0417;

/// Inputs shared by every check.
#[derive(Clone, Debug)]
pub struct Settings {
    pub seed: u64,
    /// Replaces the generated quantifier-free corpus when set.
    pub corpus: Option<Vec<Sequent>>,
    pub trials: usize,
    pub bounds: SearchBounds,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            seed: DEFAULT_SEED,
            corpus: None,
            trials: 200,
            bounds: SearchBounds::default(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub summary: String,
    /// First failing input, rendered.
    pub counterexample: Option<String>,
    pub elapsed: Duration,
}

pub const NAMES: [&str; 10] = [
    "paraclassical-equivalence",
    "soparast-equivalence",
    "tolerance-validity",
    "cut-failure",
    "improper-sorites",
    "metainference-matrix",
    "conservativity",
    "calculus-agreement",
    "crispification",
    "parameter-profiles",
];

pub fn id_of(name: &str) -> Option<u8> {
    NAMES.iter().position(|n| *n == name).map(|i| i as u8 + 1)
}

/// `<[0,1], {1}, [0,1/2)>`.
pub fn one_sided() -> Parameter {
    parse_parameter("V=[0,1] T={1} F=[0,1/2)")
        .expect("literal")
        .named("ASYM")
}

/// `<[0,1], [3/5,1], [0,2/5]>`.
pub fn closed_bounds() -> Parameter {
    parse_parameter("V=[0,1] T=[3/5,1] F=[0,2/5]")
        .expect("literal")
        .named("NONOPEN")
}

/// Finite parameters whose `F` (resp. `T`) side has no mirror.
pub fn finite_one_sided() -> [Parameter; 2] {
    [
        parse_parameter("V={0,1/4,1/2,3/4,1} T={1} F={0,1/4}")
            .expect("literal")
            .named("ASYM-F5"),
        parse_parameter("V={0,1/4,1/2,3/4,1} T={3/4,1} F={0}")
            .expect("literal")
            .named("ASYM-T5"),
    ]
}

/// Every parameter the checks range over.
pub fn tested_parameters() -> Vec<Parameter> {
    let mut out = vec![
        Parameter::classical(),
        Parameter::st(),
        Parameter::smith(),
        Parameter::vn(5).expect("preset"),
        Parameter::vn(7).expect("preset"),
        Parameter::dyadic(3).expect("preset"),
        one_sided(),
        closed_bounds(),
    ];
    out.extend(finite_one_sided());
    out
}

fn qf_corpus(settings: &Settings, count: usize) -> Vec<Sequent> {
    match &settings.corpus {
        Some(c) => c.iter().take(count).cloned().collect(),
        None => corpus(settings.seed, count, CorpusConfig::default()),
    }
}

fn status(s: &Sequent, p: &Parameter, mode: Mode, b: &SearchBounds, fast: bool) -> Status {
    decide_with(s, p, mode, b, fast).map_or(Status::Unknown, |v| v.status())
}

pub fn run(id: u8, settings: &Settings) -> CriterionReport {
    let start = Instant::now();
    let (passed, summary, counterexample) = match id {
        1 => paraclassical(settings),
        2 => soparast(settings),
        3 => tolerance(settings),
        4 => cut_failure(settings),
        5 => improper_sorites(settings),
        6 => metainference(settings),
        7 => conservativity(settings),
        8 => calculus(settings),
        9 => crispification(settings),
        10 => profiles(),
        _ => (false, format!("no criterion {id}"), None),
    };
    CriterionReport {
        id,
        name: NAMES.get(usize::from(id).wrapping_sub(1)).copied().unwrap_or("unknown"),
        passed,
        summary,
        counterexample,
        elapsed: start.elapsed(),
    }
}

type Outcome = (bool, String, Option<String>);

/// Statuses per sequent across parameters; the first disagreement, if any.
fn agreement(corpus: &[Sequent], params: &[Parameter], mode: Mode, b: &SearchBounds) -> (usize, Option<String>) {
    let rows: Vec<(usize, Vec<Status>)> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, s)| (i, params.iter().map(|p| status(s, p, mode, b, false)).collect()))
        .collect();
    let mut bad = rows
        .iter()
        .filter(|(_, st)| st.iter().any(|x| *x != st[0] || *x == Status::Unknown));
    let first = bad.clone().next().map(|(i, st)| {
        let cells: Vec<String> = params
            .iter()
            .zip(st)
            .map(|(p, x)| format!("{}={x}", p.label()))
            .collect();
        format!("{}: {}", corpus[*i], cells.join(" "))
    });
    (bad.by_ref().count(), first)
}

fn paraclassical(settings: &Settings) -> Outcome {
    let start = Instant::now();
    let corpus = qf_corpus(settings, 500);
    let params = [
        Parameter::classical(),
        Parameter::st(),
        Parameter::smith(),
        Parameter::vn(5).expect("preset"),
        Parameter::dyadic(3).expect("preset"),
    ];
    let (bad, first) = agreement(&corpus, &params, Mode::Plain, &settings.bounds);
    let elapsed = start.elapsed();
    (
        bad == 0 && elapsed < Duration::from_secs(60),
        format!(
            "{} sequents, {bad} disagreements, {:.1}s",
            corpus.len(),
            elapsed.as_secs_f64()
        ),
        first,
    )
}

fn soparast(settings: &Settings) -> Outcome {
    let corpus = qf_corpus(settings, 500);
    let params = [
        Parameter::st(),
        Parameter::smith(),
        Parameter::vn(7).expect("preset"),
        Parameter::dyadic(3).expect("preset"),
    ];
    let (bad, first) = agreement(&corpus, &params, Mode::Tolerant, &settings.bounds);
    (bad == 0, format!("{} sequents, {bad} disagreements", corpus.len()), first)
}

fn tolerance(settings: &Settings) -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for text in [
        "P(a), a ~P b |- P(b)",
        "|- forall x. forall y. (P(x) & x ~P y -> P(y))",
    ] {
        let start = Instant::now();
        let s = parse_sequent(text).expect("fixed sequent");
        let verdict = decide_with(&s, &Parameter::st(), Mode::Tolerant, &settings.bounds, true);
        let elapsed = start.elapsed();
        let valid = verdict.as_ref().is_ok_and(Verdict::is_valid);
        ok &= valid && elapsed < Duration::from_secs(1);
        notes.push(format!(
            "{text}: {} in {}ms",
            verdict.map_or_else(|e| e.to_string(), |v| v.status().to_string()),
            elapsed.as_millis()
        ));
    }
    (ok, notes.join("; "), None)
}

/// `P` values of `t1..tn` in a model.
pub fn chain_values(m: &Model, n: usize) -> Vec<TruthValue> {
    (1..=n)
        .map(|i| {
            let d = m.constant(&format!("t{i}")).expect("chain constant");
            m.pred_value("P", &[d]).expect("P table")
        })
        .collect()
}

fn cut_failure(settings: &Settings) -> Outcome {
    let st = Parameter::st();
    let b = &settings.bounds;
    let steps = ["P(t1), t1 ~P t2 |- P(t2)", "P(t2), t2 ~P t3 |- P(t3)"];
    let steps_valid = steps
        .iter()
        .all(|t| status(&parse_sequent(t).unwrap(), &st, Mode::Tolerant, b, false) == Status::Valid);
    let chain = sorites_sequent("P", 3).expect("n = 3");
    let verdict = decide_with(&chain, &st, Mode::Tolerant, b, false).expect("decidable");
    let Some(m) = verdict.countermodel() else {
        return (false, format!("chain is {}", verdict.status()), None);
    };
    let values = chain_values(m, 3);
    let expected = [TruthValue::ONE, TruthValue::HALF, TruthValue::ZERO];
    let reverified = is_countermodel(m, &chain, &st, Mode::Tolerant).unwrap_or(false);
    let shown: Vec<String> = values.iter().map(ToString::to_string).collect();
    (
        steps_valid && values == expected && reverified,
        format!(
            "steps valid: {steps_valid}; chain invalid with P = ({}); re-verified: {reverified}",
            shown.join(", ")
        ),
        (!steps_valid || values != expected).then(|| m.to_string()),
    )
}

fn improper_sorites(settings: &Settings) -> Outcome {
    let b = &settings.bounds;
    let mut failures = Vec::new();
    for n in 2..=6 {
        let s = sorites_sequent("P", n).expect("n >= 2");
        let st = status(&s, &Parameter::classical(), Mode::Tolerant, b, false);
        if st != Status::Valid {
            failures.push(format!("CLASSICAL n={n}: {st}"));
        }
    }
    let proper: Vec<Parameter> = tested_parameters().into_iter().filter(Parameter::is_proper).collect();
    let cases: Vec<(Parameter, usize)> = proper
        .iter()
        .flat_map(|p| (3..=6).map(move |n| (p.clone(), n)))
        .collect();
    let bad: Vec<String> = cases
        .par_iter()
        .filter_map(|(p, n)| {
            let s = sorites_sequent("P", *n).expect("n >= 3");
            let st = status(&s, p, Mode::Tolerant, b, false);
            (st != Status::Invalid).then(|| format!("{} n={n}: {st}", p.label()))
        })
        .collect();
    failures.extend(bad);
    (
        failures.is_empty(),
        format!(
            "classical chains 2..6 valid; {} proper parameters x chains 3..6 invalid; {} failures",
            proper.len(),
            failures.len()
        ),
        failures.first().cloned(),
    )
}

/// Search bounds for metainference sampling: one grid point per zone.
pub fn meta_bounds(b: &SearchBounds) -> SearchBounds {
    SearchBounds {
        max_domain: b.max_domain.min(2),
        values_per_zone: 1,
        timeout: Duration::from_secs(2),
        ..b.clone()
    }
}

/// Rules whose closure every parameter enjoys.
pub const STRUCTURAL: [RuleName; 12] = [
    RuleName::Id,
    RuleName::K,
    RuleName::AndL,
    RuleName::AndR,
    RuleName::OrL,
    RuleName::OrR,
    RuleName::ForallL,
    RuleName::ExistsR,
    RuleName::SimRef,
    RuleName::SimSymL,
    RuleName::SimSymR,
    RuleName::Tol,
];
pub const NEGATIVE: [RuleName; 4] = [RuleName::NotL, RuleName::NotR, RuleName::ImpL, RuleName::ImpR];
pub const EIGEN: [RuleName; 2] = [RuleName::ForallR, RuleName::ExistsL];

/// The model `M(Pa) = M(a ~P b) = 3/5`, `M(Pb) = 2/5`.
pub fn conditional_countermodel() -> Model {
    let v = |n| TruthValue::of(n, 5);
    ModelBuilder::new(["d1", "d2"])
        .constant("a", "d1")
        .and_then(|m| m.constant("b", "d2"))
        .and_then(|m| m.pred("P", &["d1"], v(3)))
        .and_then(|m| m.pred("P", &["d2"], v(2)))
        .and_then(|m| m.sim("P", "d1", "d2", v(3)))
        .and_then(|m| m.build())
        .expect("well formed")
}

fn closure_table(settings: &Settings) -> Vec<(Parameter, RuleName, ClosureReport)> {
    let b = meta_bounds(&settings.bounds);
    let jobs: Vec<(Parameter, RuleName)> = tested_parameters()
        .into_iter()
        .flat_map(|p| {
            let finite_open = p.v.as_finite().is_some() && p.is_open();
            let mut rules: Vec<RuleName> = STRUCTURAL.into_iter().chain(NEGATIVE).collect();
            if finite_open {
                rules.extend(EIGEN);
            }
            rules.into_iter().map(move |r| (p.clone(), r))
        })
        .collect();
    jobs.into_par_iter()
        .map(|(p, r)| {
            let report = check_metainference_closure(
                MetaRule::Figure(r),
                &p,
                Mode::Tolerant,
                settings.trials,
                &b,
                settings.seed ^ (r as u64) << 8,
            )
            .expect("valid inputs");
            (p, r, report)
        })
        .collect()
}

fn metainference(settings: &Settings) -> Outcome {
    let table = closure_table(settings);
    let mut failures = Vec::new();
    let enough = |r: &ClosureReport| r.holds() && r.checked >= settings.trials;
    for (p, rule, report) in &table {
        if (STRUCTURAL.contains(rule) || EIGEN.contains(rule)) && !enough(report) {
            failures.push(format!(
                "{} {rule}: holds={} checked={}",
                p.label(),
                report.holds(),
                report.checked
            ));
        }
    }
    for p in tested_parameters() {
        let negative: Vec<&ClosureReport> = table
            .iter()
            .filter(|(q, r, _)| q.label() == p.label() && NEGATIVE.contains(r))
            .map(|(_, _, rep)| rep)
            .collect();
        let all_hold = negative.iter().all(|r| enough(r));
        let any_fails = negative.iter().any(|r| !r.holds());
        let ok = if p.is_symmetric() { all_hold } else { any_fails };
        if !ok {
            failures.push(format!(
                "{}: symmetric={} but negative rules {}",
                p.label(),
                p.is_symmetric(),
                if any_fails { "fail" } else { "hold" }
            ));
        }
    }
    let asym = one_sided();
    let fired = table.iter().any(|(p, r, rep)| {
        p.label() == asym.label()
            && *r == RuleName::ImpR
            && rep.counterexample.as_ref().is_some_and(|(i, _)| i.origin == "library")
    });
    let conditional = parse_sequent("|- P(a) & a ~P b -> P(b)").expect("fixed");
    let exact = is_countermodel(&conditional_countermodel(), &conditional, &asym, Mode::Tolerant).unwrap_or(false);
    if !fired || !exact {
        failures.push(format!("ASYM ImpR library instance fired={fired}, 3/5,3/5,2/5 model={exact}"));
    }
    let cells = table.len();
    let checked: usize = table.iter().map(|(_, _, r)| r.checked).sum();
    (
        failures.is_empty(),
        format!("{cells} parameter/rule cells, {checked} instances checked, {} failures", failures.len()),
        failures.first().cloned(),
    )
}

fn conservativity(settings: &Settings) -> Outcome {
    let config = CorpusConfig {
        similarity: false,
        ..CorpusConfig::default()
    };
    let corpus: Vec<Sequent> = match &settings.corpus {
        Some(c) => c.iter().filter(|s| !s.contains_similarity()).take(200).cloned().collect(),
        None => corpus(settings.seed.wrapping_add(7), 200, config),
    };
    let b = &settings.bounds;
    let params = tested_parameters();
    let bad: Vec<String> = corpus
        .par_iter()
        .flat_map_iter(|s| {
            let classical = status(s, &Parameter::classical(), Mode::Plain, b, false);
            params
                .iter()
                .filter_map(|p| {
                    let st = status(s, p, Mode::Tolerant, b, false);
                    (st != classical || st == Status::Unknown)
                        .then(|| format!("{s} under {}: {st}, classically {classical}", p.label()))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    (
        bad.is_empty(),
        format!("{} sequents x {} parameters, {} exceptions", corpus.len(), params.len(), bad.len()),
        bad.first().cloned(),
    )
}

fn calculus(settings: &Settings) -> Outcome {
    let st = Parameter::st();
    let b = &settings.bounds;
    let mut g = Generator::new(settings.seed.wrapping_add(11), CorpusConfig::default());
    let (mut valid, mut invalid) = (Vec::new(), Vec::new());
    let supplied = settings.corpus.clone().unwrap_or_default();
    let mut supplied = supplied.into_iter();
    let mut drawn = 0;
    while (valid.len() < 200 || invalid.len() < 200) && drawn < 20_000 {
        drawn += 1;
        let s = supplied.next().unwrap_or_else(|| g.sequent());
        match decide_with(&s, &st, Mode::Tolerant, b, false) {
            Ok(Verdict::Valid { .. }) if valid.len() < 200 => valid.push(s),
            Ok(v @ Verdict::Invalid { .. }) if invalid.len() < 200 => invalid.push((s, v)),
            _ => {}
        }
    }
    let mut failures = Vec::new();
    for s in &valid {
        match prove(s, 20, b.term_pool_extra) {
            Ok(proof) => {
                let report = check_proof(&proof);
                if !report.ok || proof.conclusion != *s || proof.height() > 20 {
                    failures.push(format!("{s}: bad proof ({})", report.reason.unwrap_or_default()));
                }
            }
            Err(e) => failures.push(format!("{s}: {e}")),
        }
    }
    for (s, v) in &invalid {
        let refuted = v
            .countermodel()
            .is_some_and(|m| is_countermodel(m, s, &st, Mode::Tolerant).unwrap_or(false));
        if prove(s, 20, b.term_pool_extra).is_ok() || !refuted {
            failures.push(format!("{s}: proved although invalid"));
        }
    }
    (
        failures.is_empty() && valid.len() == 200 && invalid.len() == 200,
        format!(
            "{} valid proved, {} invalid refuted, {} disagreements",
            valid.len(),
            invalid.len(),
            failures.len()
        ),
        failures.first().cloned(),
    )
}

fn random_model(rng: &mut ChaCha8Rng, values: &[TruthValue]) -> Model {
    let n = rng.gen_range(1..=3);
    let names: Vec<String> = (1..=n).map(|i| format!("d{i}")).collect();
    let mut b = ModelBuilder::new(names.clone());
    for (c, d) in ["a", "b", "c"].iter().enumerate() {
        b = b.constant(d, &names[c % n]).expect("known element");
    }
    let pick = |rng: &mut ChaCha8Rng| values[rng.gen_range(0..values.len())];
    for pred in ["P", "Q"] {
        for d in &names {
            b = b.pred(pred, &[d], pick(rng)).expect("fresh entry");
        }
    }
    for (i, d) in names.iter().enumerate() {
        for e in &names[i + 1..] {
            b = b.sim("P", d, e, pick(rng)).expect("fresh entry");
        }
    }
    b.sim_base("P").build().expect("complete model")
}

fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    let c = |rng: &mut ChaCha8Rng| Term::constant(["a", "b", "c"][rng.gen_range(0..3)]);
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => Formula::pred("P", [c(rng)]),
            1 => Formula::pred("Q", [c(rng)]),
            _ => Formula::sim("P", c(rng), c(rng)),
        };
    }
    match rng.gen_range(0..6) {
        0 => Formula::not(random_formula(rng, depth - 1)),
        1 => Formula::and(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        2 => Formula::or(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        3 => Formula::implies(random_formula(rng, depth - 1), random_formula(rng, depth - 1)),
        op => {
            let body = random_formula(rng, depth - 1);
            let consts: Vec<String> = body.constants().into_iter().collect();
            let Some(k) = consts.get(rng.gen_range(0..consts.len().max(1))) else {
                return body;
            };
            let body = body.abstract_constant(k, "x");
            if op == 4 {
                Formula::forall("x", body)
            } else {
                Formula::exists("x", body)
            }
        }
    }
}

fn crispification(settings: &Settings) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed.wrapping_add(13));
    let mut failures = Vec::new();
    let grid: Vec<TruthValue> = (0..=12).map(|k| TruthValue::of(k, 12)).collect();
    for _ in 0..1000 {
        let m = random_model(&mut rng, &grid);
        let f = random_formula(&mut rng, 4);
        let before = eval_closed(&m, &f).expect("closed over the model's symbols");
        for tie in [false, true] {
            let after = eval_closed(&crispify(&m, |_| tie), &f).expect("same symbols");
            let ok = if before > TruthValue::HALF {
                after == TruthValue::ONE
            } else if before < TruthValue::HALF {
                after == TruthValue::ZERO
            } else {
                after.is_crisp()
            };
            if !ok {
                failures.push(format!("{f}: {before} became {after} (ties to {})", u8::from(tie)));
            }
        }
    }
    let spaces: Vec<Vec<TruthValue>> = [
        Parameter::vn(3).expect("preset"),
        Parameter::vn(5).expect("preset"),
        Parameter::dyadic(3).expect("preset"),
    ]
    .iter()
    .map(|p| p.v.as_finite().expect("finite").to_vec())
    .collect();
    for i in 0..1000 {
        let values = &spaces[i % spaces.len()];
        let m = random_model(&mut rng, values);
        let f = random_formula(&mut rng, 4);
        let v = eval_closed(&m, &f).expect("closed");
        if !ValueSet::finite(values.clone()).contains(v) {
            failures.push(format!("{f} left its value set with {v}"));
        }
    }
    (
        failures.is_empty(),
        format!("1000 crispification pairs x 2 tie-breaks, 1000 closure pairs, {} failures", failures.len()),
        failures.first().cloned(),
    )
}

fn profiles() -> Outcome {
    let mut failures = Vec::new();
    let mut expect = |p: &Parameter, proper: bool, symmetric: bool, open: bool| {
        let prof = p.profile();
        let got = (prof.is_proper(), prof.is_symmetric(), prof.is_open());
        if got != (proper, symmetric, open) {
            failures.push(format!(
                "{}: proper={} symmetric={} open={}, expected {proper}/{symmetric}/{open}",
                p.label(),
                got.0,
                got.1,
                got.2
            ));
        }
    };
    expect(&Parameter::smith(), true, true, true);
    expect(&one_sided(), true, false, true);
    expect(&Parameter::classical(), false, true, true);
    let nonopen = closed_bounds();
    let witness = nonopen.openness_witness();
    if witness.is_none() || nonopen.is_open() {
        failures.push("NONOPEN: expected a non-openness witness".into());
    }
    (
        failures.is_empty(),
        format!(
            "SMITH, ASYM, NONOPEN ({}), CLASSICAL; {} mismatches",
            witness.map_or_else(|| "no witness".to_string(), |w| w.to_string()),
            failures.len()
        ),
        failures.first().cloned(),
    )
}
