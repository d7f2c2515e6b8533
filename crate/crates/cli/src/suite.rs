//! Suite specifications: named checks read from TOML.
//!
//! ```toml
//! seed = 1
//! trials = 200
//! corpus = "corpus.txt"   # optional, one sequent per line
//!
//! [[check]]
//! name = "cut-failure"
//! description = "tolerance steps valid, chain invalid"
//!
//! [[check]]
//! name = "cut-on-st"
//! kind = "closure"
//! rule = "Cut"
//! param = "ST"
//! expect = "holds"
//! ```

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Deserialize;

use tolerance_lab::consequence::{check_metainference_closure, MetaRule, Mode, SearchBounds};
use tolerance_lab::parameter::parse_parameter;
use tolerance_lab::syntax::{parse_sequent, Sequent};

use crate::criteria::{self, meta_bounds, Settings, DEFAULT_SEED, NAMES};

#[derive(Clone, Debug, Default, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    #[default]
    Criterion,
    Closure,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Holds,
    Fails,
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    pub name: String,
    #[serde(default)]
    pub description: String,
    #[serde(default)]
    pub kind: CheckKind,
    /// Criterion name or number; defaults to `name`.
    pub criterion: Option<String>,
    pub rule: Option<String>,
    pub param: Option<String>,
    #[serde(default = "tolerant")]
    pub mode: String,
    pub expect: Option<Expectation>,
    pub trials: Option<usize>,
}

fn tolerant() -> String {
    "tolerant".into()
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SuiteSpec {
    pub seed: Option<u64>,
    pub trials: Option<usize>,
    pub corpus: Option<PathBuf>,
    #[serde(default, rename = "check")]
    pub checks: Vec<CheckSpec>,
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("cannot read {path}: {source}")]
    Missing { path: PathBuf, source: std::io::Error },
    #[error("malformed suite: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("suite has no checks")]
    Empty,
    #[error("corpus line {line}: {message}")]
    Corpus { line: usize, message: String },
    #[error("check `{name}`: {message}")]
    Check { name: String, message: String },
}

impl SuiteError {
    /// 66 for unreadable files, 64 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            SuiteError::Missing { .. } => 66,
            _ => 64,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub summary: String,
    pub counterexample: Option<String>,
    pub elapsed: Duration,
}

impl SuiteSpec {
    /// Every acceptance criterion, in order.
    pub fn default_suite() -> SuiteSpec {
        SuiteSpec {
            seed: None,
            trials: None,
            corpus: None,
            checks: NAMES
                .iter()
                .map(|n| CheckSpec {
                    name: n.to_string(),
                    description: String::new(),
                    kind: CheckKind::Criterion,
                    criterion: None,
                    rule: None,
                    param: None,
                    mode: tolerant(),
                    expect: None,
                    trials: None,
                })
                .collect(),
        }
    }

    pub fn load(path: &Path) -> Result<SuiteSpec, SuiteError> {
        let text = std::fs::read_to_string(path).map_err(|source| SuiteError::Missing {
            path: path.to_path_buf(),
            source,
        })?;
        let mut spec: SuiteSpec = toml::from_str(&text)?;
        if let (Some(corpus), Some(dir)) = (&spec.corpus, path.parent()) {
            spec.corpus = Some(dir.join(corpus));
        }
        Ok(spec)
    }

    /// Checks names and arguments without running anything.
    pub fn validate(&self) -> Result<(), SuiteError> {
        if self.checks.is_empty() {
            return Err(SuiteError::Empty);
        }
        for c in &self.checks {
            let err = |message: String| SuiteError::Check {
                name: c.name.clone(),
                message,
            };
            match c.kind {
                CheckKind::Criterion => {
                    criterion_id(c).ok_or_else(|| err("unknown criterion".into()))?;
                }
                CheckKind::Closure => {
                    let rule = c.rule.as_deref().ok_or_else(|| err("closure checks need `rule`".into()))?;
                    MetaRule::from_name(rule).ok_or_else(|| err(format!("unknown rule `{rule}`")))?;
                    let p = parse_parameter(c.param.as_deref().unwrap_or("ST")).map_err(|e| err(e.to_string()))?;
                    p.validate().map_err(|e| err(e.to_string()))?;
                    parse_mode(&c.mode).ok_or_else(|| err(format!("unknown mode `{}`", c.mode)))?;
                }
            }
        }
        Ok(())
    }

    pub fn settings(&self, seed: Option<u64>, bounds: &SearchBounds) -> Result<Settings, SuiteError> {
        let corpus = match &self.corpus {
            Some(path) => Some(read_corpus(path)?),
            None => None,
        };
        Ok(Settings {
            seed: seed.or(self.seed).unwrap_or(DEFAULT_SEED),
            corpus,
            trials: self.trials.unwrap_or(200),
            bounds: bounds.clone(),
        })
    }

    /// Runs every check in order; `on_done` sees each outcome as it lands.
    pub fn run(&self, settings: &Settings, mut on_done: impl FnMut(&CheckOutcome)) -> Vec<CheckOutcome> {
        self.checks
            .iter()
            .map(|c| {
                let outcome = run_check(c, settings);
                on_done(&outcome);
                outcome
            })
            .collect()
    }
}

fn parse_mode(text: &str) -> Option<Mode> {
    match text {
        "tolerant" => Some(Mode::Tolerant),
        "plain" => Some(Mode::Plain),
        _ => None,
    }
}

fn criterion_id(c: &CheckSpec) -> Option<u8> {
    let key = c.criterion.as_deref().unwrap_or(&c.name);
    key.parse::<u8>()
        .ok()
        .filter(|n| (1..=10).contains(n))
        .or_else(|| criteria::id_of(key))
}

/// Reads sequents, one per line; blank lines and `#` comments are skipped.
pub fn read_corpus(path: &Path) -> Result<Vec<Sequent>, SuiteError> {
    let text = std::fs::read_to_string(path).map_err(|source| SuiteError::Missing {
        path: path.to_path_buf(),
        source,
    })?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            parse_sequent(l).map_err(|e| SuiteError::Corpus {
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

fn run_check(c: &CheckSpec, settings: &Settings) -> CheckOutcome {
    let start = Instant::now();
    let mut settings = settings.clone();
    if let Some(t) = c.trials {
        settings.trials = t;
    }
    match c.kind {
        CheckKind::Criterion => {
            let id = criterion_id(c).expect("validated");
            let r = criteria::run(id, &settings);
            CheckOutcome {
                name: c.name.clone(),
                passed: r.passed,
                summary: r.summary,
                counterexample: r.counterexample,
                elapsed: r.elapsed,
            }
        }
        CheckKind::Closure => {
            let rule = MetaRule::from_name(c.rule.as_deref().expect("validated")).expect("validated");
            let p = parse_parameter(c.param.as_deref().unwrap_or("ST")).expect("validated");
            let mode = parse_mode(&c.mode).expect("validated");
            let expect = c.expect.clone().unwrap_or(Expectation::Holds);
            let bounds = meta_bounds(&settings.bounds);
            let (passed, summary, counterexample) =
                match check_metainference_closure(rule, &p, mode, settings.trials, &bounds, settings.seed) {
                    Ok(report) => {
                        let holds = report.holds();
                        let passed = holds == (expect == Expectation::Holds);
                        let summary = format!(
                            "{rule} under {} ({mode}): {} after {} instances",
                            p.label(),
                            if holds { "holds" } else { "fails" },
                            report.checked
                        );
                        let cx = report
                            .counterexample
                            .map(|(inst, m)| format!("{inst}\n{m}"));
                        (passed, summary, cx)
                    }
                    Err(e) => (false, e.to_string(), None),
                };
            CheckOutcome {
                name: c.name.clone(),
                passed,
                summary,
                counterexample,
                elapsed: start.elapsed(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_validates() {
        let spec: SuiteSpec = toml::from_str(
            r#"
            seed = 3
            [[check]]
            name = "cut-failure"
            [[check]]
            name = "cut-on-st"
            kind = "closure"
            rule = "Cut"
            param = "ST"
            expect = "fails"
            "#,
        )
        .unwrap();
        assert_eq!(spec.checks.len(), 2);
        assert_eq!(spec.checks[1].kind, CheckKind::Closure);
        spec.validate().unwrap();
        SuiteSpec::default_suite().validate().unwrap();
    }

    #[test]
    fn rejects_bad_specs() {
        let empty: SuiteSpec = toml::from_str("seed = 1").unwrap();
        assert!(matches!(empty.validate(), Err(SuiteError::Empty)));
        let unknown: SuiteSpec = toml::from_str("[[check]]\nname = \"nope\"").unwrap();
        assert!(matches!(unknown.validate(), Err(SuiteError::Check { .. })));
        assert!(toml::from_str::<SuiteSpec>("[[check]]\nname = \"x\"\nbogus = 1").is_err());
        let e = SuiteSpec::load(Path::new("/nonexistent/suite.toml")).unwrap_err();
        assert_eq!(e.exit_code(), 66);
    }

    #[test]
    fn cut_closure_reports_the_split_sorites() {
        let spec: SuiteSpec =
            toml::from_str("[[check]]\nname = \"cut\"\nkind = \"closure\"\nrule = \"Cut\"\nparam = \"ST\"").unwrap();
        let settings = spec.settings(Some(1), &SearchBounds::default()).unwrap();
        let out = spec.run(&settings, |_| {});
        assert!(!out[0].passed);
        let cx = out[0].counterexample.as_deref().unwrap();
        assert!(cx.contains("t1 ~P t2"), "{cx}");
    }
}
