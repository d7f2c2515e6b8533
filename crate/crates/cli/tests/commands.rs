use std::path::Path;
use std::process::Command;

use tolerance_lab_cli::record::ResultRecord;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tolerance-lab"))
        .args(args)
        .env_remove("TOLERANCE_LAB_SEED")
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn check_exit_codes() {
    assert_eq!(run(&["check", "Pa, a ~P b |- Pb", "--param", "ST", "--tolerant"]).0, 0);
    let (code, out, _) = run(&["check", "Pt1, t1~Pt2, t2~Pt3 |- Pt3", "--param", "ST", "--tolerant"]);
    assert_eq!(code, 1);
    assert!(out.contains("countermodel:") && out.contains("pred P(d2) = 1/2"), "{out}");
    assert_eq!(run(&["check", "Pa |- Pb"]).0, 1);
    assert_eq!(run(&["check", "|- forall x. P(x) | !P(x)", "--param", "SMITH"]).0, 0);
}

#[test]
fn quantified_sequent_without_proof_is_unknown() {
    // Valid, but ForallR is not sound for a non-open parameter, so the
    // prover cannot use it and finite search cannot confirm validity.
    let (code, out, _) = run(&[
        "check",
        "forall x. P(x) & Q(x) |- forall x. P(x)",
        "--param",
        "V=[0,1] T=[3/5,1] F=[0,2/5]",
        "--tolerant",
    ]);
    assert_eq!(code, 2, "{out}");
    assert!(out.contains("unknown up to bounds"), "{out}");
    let (code, out, _) = run(&["check", "P(a) |- forall x. P(x)", "--param", "ST", "--tolerant"]);
    assert_eq!(code, 1, "{out}");
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(run(&["check", "P(a |- "]).0, 64);
    assert_eq!(run(&["check", "P(x) |- P(a)"]).0, 64);
    assert_eq!(run(&["check", "Pa |- Pa", "--param", "NOPE"]).0, 64);
    assert_eq!(run(&["check", "Pa |- Pa", "--param", "V=[0,1] T=[2/5,1] F={0}"]).0, 64);
    assert_eq!(run(&["frobnicate"]).0, 64);
    assert_eq!(run(&["check"]).0, 64);
    assert_eq!(run(&["check", "Pa |- Pa", "--tolerant", "--plain"]).0, 64);
    assert_eq!(run(&["sorites", "--n", "1"]).0, 64);
    assert_eq!(run(&["--help"]).0, 0);
    assert_eq!(run(&["--version"]).0, 0);
}

#[test]
fn fast_path_agrees_with_direct_search() {
    let sequents = [
        "Pa, a ~P b |- Pb",
        "Pt1, t1~Pt2, t2~Pt3 |- Pt3",
        "|- Pa | !Pa",
        "Pa & !Pa |-",
        "Pa -> Qa, Pa |- Qa",
        "a ~P b |- b ~P a",
    ];
    for param in ["ST", "VN(5)", "DYADIC(3)", "CLASSICAL", "V={0,1/4,1/2,3/4,1} T={1} F={0,1/4}"] {
        for mode in ["--plain", "--tolerant"] {
            for s in sequents {
                let fast = run(&["check", s, "--param", param, mode]).0;
                let direct = run(&["check", s, "--param", param, mode, "--no-fast-path"]).0;
                assert_eq!(fast, direct, "{s} under {param} {mode}");
            }
        }
    }
}

#[test]
fn prove_and_checkproof() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("tol.proof");
    let f = file.to_str().unwrap();
    let (code, _, err) = run(&["prove", "|- forall x. forall y. ((P(x) & x~P y) -> P(y))", "--out", f]);
    assert_eq!(code, 0, "{err}");
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("(rule \"ForallR\""));
    let (code, out, _) = run(&["checkproof", f]);
    assert_eq!(code, 0);
    assert!(out.starts_with("ok: proof of |- forall x."), "{out}");

    assert_eq!(run(&["prove", "|- Pa | !Pa"]).0, 0);
    let (code, _, err) = run(&["prove", "Pt1, t1~Pt2, t2~Pt3 |- Pt3"]);
    assert_eq!(code, 2);
    assert!(err.contains("nodes explored"), "{err}");

    // A tampered conclusion is rejected.
    std::fs::write(&file, text.replacen("P(y)", "Q(y)", 1)).unwrap();
    assert_eq!(run(&["checkproof", f]).0, 1);

    std::fs::write(&file, "(rule \"Cut\" (conclusion \"P(a) |- P(a)\"))").unwrap();
    let (code, out, _) = run(&["checkproof", f]);
    assert_eq!(code, 1);
    assert!(out.contains("Cut is not a rule"));

    std::fs::write(&file, "(rule \"Id\"").unwrap();
    assert_eq!(run(&["checkproof", f]).0, 64);
    assert_eq!(run(&["checkproof", "/nonexistent/file.proof"]).0, 66);
}

#[test]
fn eval_reads_model_files() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m.model");
    std::fs::write(
        &file,
        "domain d1 d2\nconst a = d1\nconst b = d2\npred P(d1) = 3/5\npred P(d2) = 2/5\nsim P(d1,d2) = 3/5\n",
    )
    .unwrap();
    let f = file.to_str().unwrap();
    let (code, out, _) = run(&["eval", f, "P(a) & a ~P b -> P(b)", "--param", "V=[0,1] T={1} F=[0,1/2)"]);
    assert_eq!(code, 0);
    assert_eq!(out, "2/5\nin F of V=[0,1] T={1} F=[0,1/2)\n");
    let (_, out, _) = run(&["eval", f, "forall x. P(x) | !P(x)", "--param", "SMITH"]);
    assert!(out.starts_with("3/5\nin T"), "{out}");
    assert_eq!(run(&["eval", f, "Q(a)"]).0, 64);
    assert_eq!(run(&["eval", "/nonexistent.model", "P(a)"]).0, 66);
}

#[test]
fn param_reports() {
    let (code, out, _) = run(&["param", "SMITH"]);
    assert_eq!(code, 0);
    assert!(out.contains("proper: yes") && out.contains("symmetric: yes") && out.contains("open: yes"));
    assert!(out.contains("soparast"));
    let (_, out, _) = run(&["param", "V=[0,1] T=[3/5,1] F=[0,2/5]"]);
    assert!(out.contains("open: no (X = {x < 3/5}"), "{out}");
    let (_, out, _) = run(&["param", "CLASSICAL"]);
    assert!(out.contains("proper: no") && out.contains("sorites chains valid"));
    let (_, out, _) = run(&["param", "--param", "ST"]);
    assert!(out.starts_with("V={0,1/2,1}"), "{out}");
    assert_eq!(run(&["param", "V=[0,1] T=[2/5,1] F={0}"]).0, 64);
}

#[test]
fn sorites_table_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let plot = dir.path().join("plot.dat");
    let (code, out, _) = run(&["sorites", "--param", "ST", "--n", "5", "--plot", plot.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(out.matches("step ").count(), 4);
    assert!(out.lines().filter(|l| l.starts_with("step")).all(|l| l.contains(" valid (")));
    assert!(out.contains("chain: ") && out.contains(" invalid ("));
    let data = std::fs::read_to_string(&plot).unwrap();
    assert_eq!(data.lines().count(), 5);
    assert!(data.starts_with("1 1\n2 0.5\n"), "{data}");

    assert_eq!(run(&["sorites", "--param", "CLASSICAL", "--n", "5"]).0, 0);
    let (code, out, _) = run(&["sorites", "--param", "ST", "--n", "2"]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("step ").count(), 1);
}

#[test]
fn records_round_trip() {
    for args in [
        vec!["check", "Pt1, t1~Pt2, t2~Pt3 |- Pt3", "--param", "ST", "--tolerant", "--format", "record"],
        vec!["check", "Pt1, t1~Pt2, t2~Pt3 |- Pt3", "--param", "SMITH", "--tolerant", "--format", "record"],
        vec!["check", "Pa |- Pb", "--format", "record"],
        vec!["prove", "|- Pa | !Pa", "--format", "record"],
        vec!["sorites", "--param", "VN(5)", "--n", "4", "--format", "record"],
        vec!["param", "SMITH", "--format", "record"],
    ] {
        let (_, out, _) = run(&args);
        assert!(!out.is_empty(), "{args:?}");
        for line in out.lines() {
            let r = ResultRecord::from_line(line).unwrap_or_else(|e| panic!("{args:?}: {e}\n{line}"));
            assert_eq!(r.to_line(), line);
        }
    }
    let (_, out, _) = run(&["check", "Pt1, t1~Pt2, t2~Pt3 |- Pt3", "--param", "SMITH", "--tolerant", "--format", "record"]);
    let r = ResultRecord::from_line(out.trim()).unwrap();
    assert_eq!(r.status.as_deref(), Some("invalid"));
    assert!(r.countermodel.is_some());
    // The SMITH countermodel is tolerance-checked against SMITH, not ST.
    assert!(r.countermodel.unwrap().contains("pred P(d2) = 1/2"));
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn suite_specs() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ok = write(
        d,
        "ok.toml",
        "trials = 20\n[[check]]\nname = \"cut-failure\"\n[[check]]\nname = \"parameter-profiles-smith\"\nkind = \"closure\"\nrule = \"AndL\"\nparam = \"SMITH\"\n",
    );
    let (code, out, _) = run(&["suite", &ok]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("2 of 2 checks passed"));

    let forced = write(d, "cut.toml", "[[check]]\nname = \"cut\"\nkind = \"closure\"\nrule = \"Cut\"\nparam = \"ST\"\n");
    let (code, out, _) = run(&["suite", &forced]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL cut") && out.contains("P(t1), t1 ~P t2, t2 ~P t3 |- P(t3)"), "{out}");

    let empty = write(d, "empty.toml", "seed = 4\n");
    assert_eq!(run(&["suite", &empty]).0, 64);
    let bad = write(d, "bad.toml", "[[check]\n");
    assert_eq!(run(&["suite", &bad]).0, 64);
    assert_eq!(run(&["suite", "/nonexistent/suite.toml"]).0, 66);
    let missing_corpus = write(d, "mc.toml", "corpus = \"nowhere.txt\"\n[[check]]\nname = \"conservativity\"\n");
    assert_eq!(run(&["suite", &missing_corpus]).0, 66);

    write(d, "corpus.txt", "# tiny corpus\nPa |- Pa\nPa, a~Pb |- Pb\n\nPa |- Qa\n");
    let with_corpus = write(d, "wc.toml", "corpus = \"corpus.txt\"\n[[check]]\nname = \"paraclassical-equivalence\"\n");
    let (code, out, _) = run(&["suite", &with_corpus, "--format", "record"]);
    assert_eq!(code, 0);
    let r = ResultRecord::from_line(out.trim()).unwrap();
    assert_eq!(r.status.as_deref(), Some("pass"));
    assert!(r.detail.unwrap().starts_with("3 sequents"));
}
