use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};

use tolerance_lab::calculus::{check_proof, parse_proof, print_proof, prove, ProofFormatError};
use tolerance_lab::consequence::{decide_with, sorites_sequent, Mode, SearchBounds, Status, Verdict};
use tolerance_lab::parameter::{parse_parameter, Parameter};
use tolerance_lab::semantics::{eval_closed, Model};
use tolerance_lab::syntax::{parse_formula, parse_sequent, Sequent};

use crate::record::ResultRecord;
use crate::suite::SuiteSpec;

pub const EXIT_VALID: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_UNKNOWN: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_SOFTWARE: i32 = 70;

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Valid => EXIT_VALID,
        Status::Invalid => EXIT_INVALID,
        Status::Unknown => EXIT_UNKNOWN,
    }
}

#[derive(Parser, Debug)]
#[command(name = "tolerance-lab", version, about = "Validity, proofs and sorites chains under tolerant many-valued consequence")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Record,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Preset (CLASSICAL, ST, SMITH, VN(n), DYADIC(k)) or `V=.. T=.. F=..`.
    #[arg(long, global = true, default_value = "CLASSICAL")]
    pub param: String,
    /// Impose the tolerance clause on countermodels.
    #[arg(long, global = true, conflicts_with = "plain")]
    pub tolerant: bool,
    #[arg(long, global = true)]
    pub plain: bool,
    #[arg(long, global = true, default_value_t = 3)]
    pub max_domain: usize,
    /// Grid points per value zone for infinite value sets.
    #[arg(long, global = true, default_value_t = 2)]
    pub zone_points: usize,
    #[arg(long, global = true, default_value_t = 20)]
    pub depth: usize,
    /// Decide under the given parameter instead of its classical or ST stand-in.
    #[arg(long, global = true)]
    pub no_fast_path: bool,
    #[arg(long, global = true, value_enum, default_value = "human")]
    pub format: Format,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decide a sequent.
    Check { sequent: String },
    /// Search for a cut-free proof and print it in the proof file format.
    Prove {
        sequent: String,
        #[arg(long, default_value_t = 1)]
        term_pool_extra: usize,
    },
    /// Check a proof file.
    Checkproof { file: PathBuf },
    /// Evaluate a closed formula in a model file.
    Eval { model: PathBuf, formula: String },
    /// Report properness, symmetry and openness of a parameter.
    Param { spec: Option<String> },
    /// Per-step and whole-chain verdicts for a sorites chain.
    Sorites {
        #[arg(long, default_value = "P")]
        pred: String,
        #[arg(long, default_value_t = 5)]
        n: usize,
        /// Writes `index value` lines for the countermodel.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Run a suite of named checks; the default suite runs every acceptance check.
    Suite {
        spec: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

/// A command's result: main output, diagnostics and exit code.
#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn usage(message: impl std::fmt::Display) -> Outcome {
        Outcome {
            stderr: format!("error: {message}\n"),
            code: EXIT_USAGE,
            ..Outcome::default()
        }
    }

    fn no_input(path: &Path, e: std::io::Error) -> Outcome {
        Outcome {
            stderr: format!("error: cannot read {}: {e}\n", path.display()),
            code: EXIT_NO_INPUT,
            ..Outcome::default()
        }
    }
}

impl Global {
    pub fn mode(&self) -> Mode {
        if self.tolerant {
            Mode::Tolerant
        } else {
            Mode::Plain
        }
    }

    pub fn bounds(&self) -> SearchBounds {
        SearchBounds {
            max_domain: self.max_domain,
            values_per_zone: self.zone_points,
            proof_depth: self.depth,
            ..SearchBounds::default()
        }
    }

    fn parameter(&self, spec: &str) -> Result<Parameter, Outcome> {
        let p = parse_parameter(spec).map_err(|e| Outcome::usage(format_args!("parameter `{spec}`: {e}")))?;
        p.validate()
            .map_err(|v| Outcome::usage(format_args!("parameter `{spec}` is not well formed: {v}")))?;
        Ok(p)
    }
}

fn sequent(text: &str) -> Result<Sequent, Outcome> {
    let s = parse_sequent(text).map_err(|e| Outcome::usage(format_args!("sequent `{text}`: {e}")))?;
    if !s.is_closed() {
        return Err(Outcome::usage(format_args!("sequent `{text}` has free variables")));
    }
    Ok(s)
}

pub fn run(cli: &Cli) -> Outcome {
    let g = &cli.global;
    let out = match &cli.command {
        Command::Check { sequent } => check(g, sequent),
        Command::Prove { sequent, term_pool_extra } => prove_cmd(g, sequent, *term_pool_extra),
        Command::Checkproof { file } => checkproof(g, file),
        Command::Eval { model, formula } => eval_cmd(g, model, formula),
        Command::Param { spec } => param(g, spec.as_deref().unwrap_or(&g.param)),
        Command::Sorites { pred, n, plot } => sorites(g, pred, *n, plot.as_deref()),
        Command::Suite { spec, seed } => suite(g, spec.as_deref(), *seed),
    };
    let mut out = out.unwrap_or_else(|e| e);
    if let (Some(path), false) = (&g.out, out.stdout.is_empty()) {
        if let Err(e) = std::fs::write(path, &out.stdout) {
            return Outcome::usage(format_args!("cannot write {}: {e}", path.display()));
        }
        out.stdout.clear();
    }
    out
}

fn describe(v: &Verdict) -> String {
    match v {
        Verdict::Valid { method } => format!("valid ({method})"),
        Verdict::Invalid { method, .. } => format!("invalid ({method})"),
        Verdict::UnknownUpToBounds {
            domain_bound,
            value_grid,
            elapsed,
        } => {
            let mut s = format!("unknown up to bounds: domains up to {domain_bound}, values {value_grid}");
            if let Some(t) = elapsed {
                let _ = write!(s, ", stopped after {:.1}s", t.as_secs_f64());
            }
            s
        }
    }
}

fn verdict_record(command: &str, g: &Global, s: &Sequent, p: &Parameter, v: &Verdict, t: Duration) -> ResultRecord {
    let mut r = ResultRecord::new(command)
        .with_input("sequent", s)
        .with_input("parameter", p)
        .with_input("mode", g.mode())
        .with_input("max_domain", g.max_domain)
        .with_input("zone_points", g.zone_points)
        .with_input("depth", g.depth)
        .with_input("fast_path", !g.no_fast_path)
        .elapsed(t);
    r.status = Some(v.status().to_string());
    r.method = v.method().to_string();
    if let Verdict::UnknownUpToBounds { .. } = v {
        r.detail = Some(describe(v));
    }
    r.countermodel = v.countermodel().map(ToString::to_string);
    r
}

fn check(g: &Global, text: &str) -> Result<Outcome, Outcome> {
    let s = sequent(text)?;
    let p = g.parameter(&g.param)?;
    let start = Instant::now();
    let v = decide_with(&s, &p, g.mode(), &g.bounds(), !g.no_fast_path).map_err(Outcome::usage)?;
    let elapsed = start.elapsed();
    let stdout = match g.format {
        Format::Record => verdict_record("check", g, &s, &p, &v, elapsed).to_line() + "\n",
        Format::Human => {
            let mut o = format!("{s}\n{} under {} ({})\n", describe(&v), p.label(), g.mode());
            if let Some(m) = v.countermodel() {
                o.push_str("countermodel:\n");
                o.push_str(&m.to_string());
            }
            o
        }
    };
    Ok(Outcome {
        stdout,
        code: exit_code(v.status()),
        ..Outcome::default()
    })
}

fn prove_cmd(g: &Global, text: &str, extra: usize) -> Result<Outcome, Outcome> {
    let s = sequent(text)?;
    let start = Instant::now();
    match prove(&s, g.depth, extra) {
        Ok(proof) => {
            let report = check_proof(&proof);
            if !report.ok {
                return Err(Outcome {
                    stderr: format!(
                        "internal error: generated proof fails to check: {}\n",
                        report.reason.unwrap_or_default()
                    ),
                    code: EXIT_SOFTWARE,
                    ..Outcome::default()
                });
            }
            let text = print_proof(&proof);
            let stdout = match g.format {
                Format::Human => text + "\n",
                Format::Record => {
                    let mut r = ResultRecord::new("prove")
                        .with_input("sequent", &s)
                        .with_input("depth", g.depth)
                        .elapsed(start.elapsed());
                    r.status = Some("proved".into());
                    r.method = "calculus".into();
                    r.detail = Some(format!("height {}, {} nodes", proof.height(), proof.size()));
                    r.proof = Some(text);
                    r.to_line() + "\n"
                }
            };
            Ok(Outcome {
                stdout,
                stderr: format!("proof of height {}, {} nodes\n", proof.height(), proof.size()),
                code: EXIT_VALID,
            })
        }
        Err(e) => {
            let stdout = match g.format {
                Format::Human => String::new(),
                Format::Record => {
                    let mut r = ResultRecord::new("prove")
                        .with_input("sequent", &s)
                        .with_input("depth", g.depth)
                        .elapsed(start.elapsed());
                    r.status = Some("unknown".into());
                    r.detail = Some(e.to_string());
                    r.to_line() + "\n"
                }
            };
            Ok(Outcome {
                stdout,
                stderr: format!("{e}\n"),
                code: EXIT_UNKNOWN,
            })
        }
    }
}

fn checkproof(g: &Global, file: &Path) -> Result<Outcome, Outcome> {
    let text = std::fs::read_to_string(file).map_err(|e| Outcome::no_input(file, e))?;
    let proof = match parse_proof(&text) {
        Ok(p) => p,
        Err(ProofFormatError::Cut) => {
            return Ok(Outcome {
                stdout: format!("rejected: {}\n", ProofFormatError::Cut),
                code: EXIT_INVALID,
                ..Outcome::default()
            })
        }
        Err(e) => return Err(Outcome::usage(format_args!("{}: {e}", file.display()))),
    };
    let report = check_proof(&proof);
    let line = if report.ok {
        format!(
            "ok: proof of {} (height {}, {} nodes)\n",
            proof.conclusion,
            proof.height(),
            proof.size()
        )
    } else {
        let path: Vec<String> = report.path.iter().map(ToString::to_string).collect();
        format!(
            "rejected at premise path [{}]: {}\n",
            path.join(" "),
            report.reason.clone().unwrap_or_default()
        )
    };
    let stdout = match g.format {
        Format::Human => line,
        Format::Record => {
            let mut r = ResultRecord::new("checkproof").with_input("file", file.display());
            r.status = Some(if report.ok { "pass" } else { "fail" }.into());
            r.detail = Some(line.trim_end().to_string());
            r.to_line() + "\n"
        }
    };
    Ok(Outcome {
        stdout,
        code: if report.ok { EXIT_VALID } else { EXIT_INVALID },
        ..Outcome::default()
    })
}

fn eval_cmd(g: &Global, model: &Path, formula: &str) -> Result<Outcome, Outcome> {
    let text = std::fs::read_to_string(model).map_err(|e| Outcome::no_input(model, e))?;
    let m: Model = text
        .parse()
        .map_err(|e| Outcome::usage(format_args!("{}: {e}", model.display())))?;
    let f = parse_formula(formula).map_err(|e| Outcome::usage(format_args!("formula `{formula}`: {e}")))?;
    let p = g.parameter(&g.param)?;
    let v = eval_closed(&m, &f).map_err(Outcome::usage)?;
    let zone = match (p.in_t(v), p.in_f(v)) {
        (true, _) => "T",
        (_, true) => "F",
        _ => "neither T nor F",
    };
    let stdout = match g.format {
        Format::Human => format!("{v}\nin {zone} of {}\n", p.label()),
        Format::Record => {
            let mut r = ResultRecord::new("eval")
                .with_input("formula", &f)
                .with_input("parameter", &p);
            r.status = Some(v.to_string());
            r.detail = Some(format!("in {zone}"));
            r.to_line() + "\n"
        }
    };
    Ok(Outcome {
        stdout,
        ..Outcome::default()
    })
}

/// The theorem routes a parameter's profile licenses.
pub fn routes(p: &Parameter) -> Vec<String> {
    let prof = p.profile();
    let mut out = vec!["plain: classical consequence (paraclassical)".to_string()];
    if prof.collapses_to_st() {
        out.push("tolerant: ST~ consequence (soparast)".into());
    } else {
        out.push("tolerant: direct countermodel search".into());
    }
    if !prof.is_proper() {
        out.push("improper: sorites chains valid".into());
    }
    out
}

fn param(g: &Global, spec: &str) -> Result<Outcome, Outcome> {
    let p = parse_parameter(spec).map_err(|e| Outcome::usage(format_args!("parameter `{spec}`: {e}")))?;
    if let Err(v) = p.validate() {
        return Err(Outcome {
            stdout: format!("{p}\nnot a parameter: {v}\n"),
            stderr: format!("error: parameter `{spec}` is not well formed: {v}\n"),
            code: EXIT_USAGE,
        });
    }
    let prof = p.profile();
    let yes_no = |b: bool| if b { "yes" } else { "no" };
    let mut o = format!("{}\nwell formed: yes\n", p);
    match prof.proper {
        Some(w) => writeln!(o, "proper: yes (value {w} is in neither T nor F)"),
        None => writeln!(o, "proper: no (T and F cover V)"),
    }
    .expect("string write");
    match prof.asymmetry {
        None => writeln!(o, "symmetric: yes"),
        Some(w) => writeln!(o, "symmetric: no ({w} and {} are not mirrored)", w.complement()),
    }
    .expect("string write");
    match &prof.openness {
        None => writeln!(o, "open: yes"),
        Some(w) => writeln!(o, "open: no ({w})"),
    }
    .expect("string write");
    for r in routes(&p) {
        writeln!(o, "route {r}").expect("string write");
    }
    let stdout = match g.format {
        Format::Human => o,
        Format::Record => {
            let mut r = ResultRecord::new("param").with_input("parameter", &p);
            r.status = Some("valid".into());
            r.detail = Some(format!(
                "proper={} symmetric={} open={}",
                yes_no(prof.is_proper()),
                yes_no(prof.is_symmetric()),
                yes_no(prof.is_open())
            ));
            r.method = routes(&p).join("; ");
            r.to_line() + "\n"
        }
    };
    Ok(Outcome {
        stdout,
        ..Outcome::default()
    })
}

fn sorites(g: &Global, pred: &str, n: usize, plot: Option<&Path>) -> Result<Outcome, Outcome> {
    let p = g.parameter(&g.param)?;
    let chain = sorites_sequent(pred, n).map_err(Outcome::usage)?;
    let bounds = g.bounds();
    let fast = !g.no_fast_path;
    let mut o = format!("sorites chain of length {n} under {} (tolerant)\n", p.label());
    let mut records = Vec::new();
    for i in 1..n {
        let step = parse_sequent(&format!("{pred}(t{i}), t{i} ~{pred} t{j} |- {pred}(t{j})", j = i + 1))
            .map_err(Outcome::usage)?;
        let start = Instant::now();
        let v = decide_with(&step, &p, Mode::Tolerant, &bounds, fast).map_err(Outcome::usage)?;
        writeln!(o, "step {i}: {step}  {}", describe(&v)).expect("string write");
        records.push(verdict_record("sorites", g, &step, &p, &v, start.elapsed()).with_input("mode", Mode::Tolerant));
    }
    let start = Instant::now();
    let v = decide_with(&chain, &p, Mode::Tolerant, &bounds, fast).map_err(Outcome::usage)?;
    writeln!(o, "chain: {chain}  {}", describe(&v)).expect("string write");
    records.push(verdict_record("sorites", g, &chain, &p, &v, start.elapsed()).with_input("mode", Mode::Tolerant));
    if let Some(m) = v.countermodel() {
        let values: Vec<_> = (1..=n)
            .map(|i| {
                let d = m.constant(&format!("t{i}")).expect("chain constant");
                m.pred_value(pred, &[d]).expect("predicate table")
            })
            .collect();
        let shown: Vec<String> = values.iter().map(ToString::to_string).collect();
        writeln!(o, "profile: {}", shown.join(" ")).expect("string write");
        if let Some(path) = plot {
            let data: String = values
                .iter()
                .enumerate()
                .map(|(i, v)| format!("{} {}\n", i + 1, v.to_f64()))
                .collect();
            std::fs::write(path, data)
                .map_err(|e| Outcome::usage(format_args!("cannot write {}: {e}", path.display())))?;
        }
    }
    let stdout = match g.format {
        Format::Human => o,
        Format::Record => records.iter().map(|r| r.to_line() + "\n").collect(),
    };
    Ok(Outcome {
        stdout,
        code: exit_code(v.status()),
        ..Outcome::default()
    })
}

fn env_seed() -> Result<Option<u64>, Outcome> {
    match std::env::var("TOLERANCE_LAB_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| Outcome::usage(format_args!("TOLERANCE_LAB_SEED must be an integer, got `{s}`"))),
        Err(_) => Ok(None),
    }
}

fn suite(g: &Global, spec: Option<&Path>, seed: Option<u64>) -> Result<Outcome, Outcome> {
    let fail = |e: crate::suite::SuiteError| Outcome {
        stderr: format!("error: {e}\n"),
        code: e.exit_code(),
        ..Outcome::default()
    };
    let suite = match spec {
        Some(path) => SuiteSpec::load(path).map_err(fail)?,
        None => SuiteSpec::default_suite(),
    };
    suite.validate().map_err(fail)?;
    let seed = seed.or(env_seed()?);
    let settings = suite.settings(seed, &g.bounds()).map_err(fail)?;
    let mut o = String::new();
    let outcomes = suite.run(&settings, |c| {
        eprintln!("{} {} ({:.1}s)", if c.passed { "PASS" } else { "FAIL" }, c.name, c.elapsed.as_secs_f64());
    });
    let mut failed = 0;
    for c in &outcomes {
        failed += usize::from(!c.passed);
        match g.format {
            Format::Human => {
                writeln!(
                    o,
                    "{} {:<28} {:>7.2}s  {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.elapsed.as_secs_f64(),
                    c.summary
                )
                .expect("string write");
                if let (false, Some(cx)) = (c.passed, &c.counterexample) {
                    for line in cx.lines() {
                        writeln!(o, "    {line}").expect("string write");
                    }
                }
            }
            Format::Record => {
                let mut r = ResultRecord::new("suite")
                    .with_input("check", &c.name)
                    .with_input("seed", settings.seed)
                    .elapsed(c.elapsed);
                r.status = Some(if c.passed { "pass" } else { "fail" }.into());
                r.detail = Some(c.summary.clone());
                if !c.passed {
                    r.detail = Some(match &c.counterexample {
                        Some(cx) => format!("{}\nfirst counterexample:\n{cx}", c.summary),
                        None => c.summary.clone(),
                    });
                }
                o.push_str(&(r.to_line() + "\n"));
            }
        }
    }
    if g.format == Format::Human {
        writeln!(o, "{} of {} checks passed", outcomes.len() - failed, outcomes.len()).expect("string write");
    }
    Ok(Outcome {
        stdout: o,
        code: if failed == 0 { 0 } else { 1 },
        ..Outcome::default()
    })
}

