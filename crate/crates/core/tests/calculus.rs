use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tolerance_lab::calculus::{check_proof, cut_node, parse_proof, print_proof, prove, ProofFormatError};
use tolerance_lab::consequence::{decide, sorites_sequent, Mode, SearchBounds, Status};
use tolerance_lab::corpus::{corpus, CorpusConfig};
use tolerance_lab::parameter::Parameter;
use tolerance_lab::syntax::{parse_formula, parse_sequent, Formula, RuleName, Sequent, Term};

fn golden() -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "proof"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, std::fs::read_to_string(&p).unwrap())
        })
        .collect()
}

#[test]
fn golden_proofs_check_and_round_trip() {
    let st = Parameter::st();
    let bounds = SearchBounds::default();
    let mut used = BTreeSet::new();
    for (name, text) in golden() {
        let proof = parse_proof(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
        let report = check_proof(&proof);
        assert!(report.ok, "{name}: {:?}", report.reason);
        assert_eq!(print_proof(&proof), text.trim_end(), "{name} does not round trip");
        let status = decide(&proof.conclusion, &st, Mode::Tolerant, &bounds).unwrap().status();
        assert_ne!(status, Status::Invalid, "{name} proves an invalid sequent");
        if proof.conclusion.is_quantifier_free() {
            assert_eq!(status, Status::Valid, "{name}");
        }
        used.extend(proof.rules_used());
    }
    let all: BTreeSet<RuleName> = RuleName::ALL.into_iter().collect();
    assert_eq!(used, all, "golden files must exercise every rule");
}

#[test]
fn tampered_golden_proofs_are_rejected() {
    for (name, text) in golden() {
        let proof = parse_proof(&text).unwrap();
        if proof.premises.is_empty() {
            continue;
        }
        let mut bad = proof.clone();
        bad.premises[0].conclusion.right.insert(parse_formula("Z(zz)").unwrap());
        bad.premises[0].conclusion.left.insert(parse_formula("Z(zz)").unwrap());
        assert!(!check_proof(&bad).ok, "{name}");
    }
}

#[test]
fn cut_composition_is_refused() {
    let left = prove(&parse_sequent("P(t1), t1 ~P t2 |- P(t2)").unwrap(), 20, 1).unwrap();
    let right = prove(&parse_sequent("P(t2), t2 ~P t3 |- P(t3)").unwrap(), 20, 1).unwrap();
    assert!(check_proof(&left).ok && check_proof(&right).ok);
    let report = cut_node(&left, &right, &parse_formula("P(t2)").unwrap());
    assert!(!report.ok);
    assert_eq!(report.reason.as_deref(), Some("Cut is not a rule of ST∼"));
    let chain = sorites_sequent("P", 3).unwrap();
    let v = decide(&chain, &Parameter::st(), Mode::Tolerant, &SearchBounds::default()).unwrap();
    assert_eq!(v.status(), Status::Invalid);

    let text = "(rule \"Cut\" (conclusion \"P(t1), t1 ~P t2, t2 ~P t3 |- P(t3)\") (principal \"P(t2)\"))";
    assert!(matches!(parse_proof(text), Err(ProofFormatError::Cut)));
}

#[test]
fn sorites_is_never_proved() {
    for depth in 1..=20 {
        assert!(prove(&sorites_sequent("P", 3).unwrap(), depth, 1).is_err(), "depth {depth}");
    }
}

#[test]
fn proofs_are_sound_and_complete_on_the_corpus() {
    let st = Parameter::st();
    let bounds = SearchBounds::default();
    for s in corpus(42, 300, CorpusConfig::default()) {
        let status = decide(&s, &st, Mode::Tolerant, &bounds).unwrap().status();
        match prove(&s, 20, 1) {
            Ok(p) => {
                assert!(check_proof(&p).ok, "{s}");
                assert_eq!(p.conclusion, s);
                assert_eq!(status, Status::Valid, "proved but not valid: {s}");
            }
            Err(e) => assert_ne!(status, Status::Valid, "valid but unproved: {s} ({e})"),
        }
    }
}

// Weakening by atoms: compound side formulas would be decomposed eagerly
// and cost extra depth.
#[test]
fn weakening_is_admissible() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let extras: Vec<Formula> = ["Q(c)", "P(d)", "c ~P d", "Q(a)", "P(b)"]
        .iter()
        .map(|t| parse_formula(t).unwrap())
        .collect();
    let mut proved = 0;
    for s in corpus(17, 300, CorpusConfig::default()) {
        let Ok(p) = prove(&s, 20, 1) else { continue };
        proved += 1;
        let mut w: Sequent = s.clone();
        for f in &extras {
            match rng.gen_range(0..3) {
                0 => {
                    w.left.insert(f.clone());
                }
                1 => {
                    w.right.insert(f.clone());
                }
                _ => {}
            }
        }
        let q = prove(&w, p.height() + 1, 1).unwrap_or_else(|e| panic!("{w}: {e}"));
        assert!(check_proof(&q).ok);
        assert!(q.height() <= p.height() + 1, "{w}");
    }
    assert!(proved > 50);
}

#[test]
fn eigenvariables_stay_out_of_user_namespace() {
    let s = parse_sequent("|- forall x. forall y. ((P(x) & x~P y) -> P(y))").unwrap();
    let p = prove(&s, 20, 1).unwrap();
    fn terms(n: &tolerance_lab::calculus::ProofNode, out: &mut Vec<Term>) {
        out.extend(n.term.clone());
        for c in &n.premises {
            terms(c, out);
        }
    }
    let mut ts = Vec::new();
    terms(&p, &mut ts);
    assert!(!ts.is_empty());
    assert!(ts.iter().all(|t| t.name().starts_with('@')));
}
