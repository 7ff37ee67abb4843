//! Command implementations behind the `futs` binary.
//!
//! Every command renders its whole output into a [`Report`] before anything
//! is printed, so a failing command never emits half a JSON document.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use futs_core::futs::{to_dot, ModelDocument};
use futs_core::gen::{
    random_corpus, random_triple, render_corpus, rng_from_seed, split_corpus, RandomPrefix,
};
use futs_core::iml::{self, ImlPrefix};
use futs_core::pepa::{self, RatedAction};
use futs_core::process::{Document, Explored, Process};
use futs_core::xcheck::{self, Check, Outcome, Tally};
use futs_core::{
    coarsest_bisimulation, distinguish, quotient, FutsModel, Rational, SemanticsError, Witness,
    DEFAULT_STATE_CAP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DIAGNOSTIC: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_BISIMILAR: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "futs",
    version,
    about = "Semantics workbench for FuTS, PEPA and IML"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse a source file and print its definitions and root.
    Parse {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Explore the transition system reachable from the roots.
    Lts {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        /// Root expression (repeatable); defaults to the file's root.
        #[arg(long = "root")]
        roots: Vec<String>,
        #[arg(long, value_enum, default_value_t = Semantics::Futs)]
        semantics: Semantics,
    },
    /// Decide bisimilarity of two roots and explain a negative answer.
    Bisim {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        /// One or two roots; with one, the file's root is the other side.
        #[arg(long = "root", required = true)]
        roots: Vec<String>,
    },
    /// Quotient the explored system by its coarsest bisimulation.
    Minimize {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
        #[arg(long = "root")]
        roots: Vec<String>,
    },
    /// Compare the two semantics on a corpus file or on random terms.
    Xcheck {
        /// One of totals, pepa-apparent-rate, pepa-rates, pepa-equivalence,
        /// iml-transitions, iml-equivalence.
        check: Check,
        /// Corpus file with documents separated by `---` lines.
        file: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        random: RandomArgs,
    },
    /// Print a random corpus of closed, guarded terms.
    Gen {
        #[arg(long, value_enum, default_value_t = Lang::Pepa)]
        lang: Lang,
        #[command(flatten)]
        random: RandomArgs,
    },
}

#[derive(Debug, Args)]
pub struct Common {
    /// Input language; inferred from the file extension when omitted.
    #[arg(long, value_enum)]
    pub lang: Option<Lang>,
    /// Maximum number of explored states.
    #[arg(long, default_value_t = DEFAULT_STATE_CAP, value_parser = positive)]
    pub cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct RandomArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub count: usize,
    #[arg(long, default_value_t = 5, value_parser = positive)]
    pub depth: usize,
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Lang {
    Pepa,
    Iml,
    /// FuTS JSON documents.
    Raw,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Semantics {
    Futs,
    Standard,
}

/// What a command prints and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Report {
    fn ok(stdout: String) -> Self {
        Report {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn fail(code: i32, message: impl Into<String>) -> Self {
        let mut stderr = message.into();
        if !stderr.ends_with('\n') {
            stderr.push('\n');
        }
        Report {
            code,
            stdout: String::new(),
            stderr,
        }
    }
}

type CmdResult<T> = Result<T, Report>;

fn usage(message: impl Into<String>) -> Report {
    Report::fail(EXIT_USAGE, format!("error: {}", message.into()))
}

fn diagnostic(message: impl std::fmt::Display) -> Report {
    Report::fail(EXIT_DIAGNOSTIC, format!("error: {message}"))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("values built here always serialize");
    s.push('\n');
    s
}

fn read(path: &Path) -> CmdResult<String> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn language(path: &Path, lang: Option<Lang>) -> Lang {
    lang.unwrap_or_else(|| match path.extension().and_then(|e| e.to_str()) {
        Some("iml") => Lang::Iml,
        Some("json") => Lang::Raw,
        _ => Lang::Pepa,
    })
}

pub fn run(cli: Cli) -> Report {
    let result = match cli.command {
        Command::Parse { file, common } => cmd_parse(&file, &common),
        Command::Lts {
            file,
            common,
            roots,
            semantics,
        } => cmd_lts(&file, &common, &roots, semantics),
        Command::Bisim {
            file,
            common,
            roots,
        } => cmd_bisim(&file, &common, &roots),
        Command::Minimize {
            file,
            common,
            roots,
        } => cmd_minimize(&file, &common, &roots),
        Command::Xcheck {
            check,
            file,
            common,
            random,
        } => cmd_xcheck(check, file.as_deref(), &common, &random),
        Command::Gen { lang, random } => cmd_gen(lang, &random),
    };
    result.unwrap_or_else(|report| report)
}

/// Language-specific hooks shared by the commands.
trait Front: RandomPrefix {
    fn explore(
        roots: &[Process<Self>],
        doc: &Document<Self>,
        cap: usize,
    ) -> Result<Explored<Process<Self>>, SemanticsError>;
    fn standard(
        roots: &[Process<Self>],
        doc: &Document<Self>,
        cap: usize,
        format: Format,
    ) -> Result<String, SemanticsError>;
}

impl Front for RatedAction {
    fn explore(
        roots: &[Process<Self>],
        doc: &Document<Self>,
        cap: usize,
    ) -> Result<Explored<Process<Self>>, SemanticsError> {
        pepa::explore_pepa(roots, &doc.env, cap)
    }

    fn standard(
        roots: &[Process<Self>],
        doc: &Document<Self>,
        cap: usize,
        format: Format,
    ) -> Result<String, SemanticsError> {
        let sys = pepa::explore_standard(roots, &doc.env, cap)?;
        let edges = sys
            .transitions
            .iter()
            .enumerate()
            .flat_map(|(s, ts)| ts.iter().map(move |t| (s, t)));
        Ok(match format {
            Format::Json => {
                let transitions: Vec<_> = edges
                    .map(|(s, t)| {
                        json!({
                            "source": sys.terms[s].to_string(),
                            "action": t.action,
                            "rate": t.rate.to_fraction_string(),
                            "target": t.target.to_string(),
                            "multiplicity": t.multiplicity,
                        })
                    })
                    .collect();
                let states: Vec<String> = sys.terms.iter().map(|t| t.to_string()).collect();
                to_json(&json!({ "states": states, "transitions": transitions }))
            }
            Format::Text => {
                let mut out = format!("{} states\n", sys.terms.len());
                for (s, t) in edges {
                    let _ = writeln!(
                        out,
                        "{} --({},{})--> {}  x{}",
                        sys.terms[s], t.action, t.rate, t.target, t.multiplicity
                    );
                }
                out
            }
            Format::Dot => {
                let mut out = String::from("digraph standard {\n  rankdir=LR;\n");
                for (s, t) in sys.terms.iter().enumerate() {
                    let _ = writeln!(out, "  s{s} [label=\"{}\"];", escape(&t.to_string()));
                }
                for (s, t) in edges {
                    let _ = writeln!(
                        out,
                        "  s{s} -> s{} [label=\"{},{} x{}\"];",
                        sys.index[&t.target], t.action, t.rate, t.multiplicity
                    );
                }
                out.push_str("}\n");
                out
            }
        })
    }
}

impl Front for ImlPrefix {
    fn explore(
        roots: &[Process<Self>],
        doc: &Document<Self>,
        cap: usize,
    ) -> Result<Explored<Process<Self>>, SemanticsError> {
        iml::explore_iml(roots, &doc.env, cap)
    }

    fn standard(
        roots: &[Process<Self>],
        doc: &Document<Self>,
        cap: usize,
        format: Format,
    ) -> Result<String, SemanticsError> {
        let sys = iml::explore_standard(roots, &doc.env, cap)?;
        let actions = || {
            sys.actions
                .iter()
                .enumerate()
                .flat_map(|(s, ts)| ts.iter().map(move |(a, t)| (s, a, t)))
        };
        let delays = || {
            sys.delays
                .iter()
                .enumerate()
                .flat_map(|(s, ds)| ds.iter().map(move |d| (s, d)))
        };
        Ok(match format {
            Format::Json => {
                let states: Vec<String> = sys.terms.iter().map(|t| t.to_string()).collect();
                let acts: Vec<_> = actions()
                    .map(|(s, a, t)| json!({"source": states[s], "action": a, "target": t.to_string()}))
                    .collect();
                let dels: Vec<_> = delays()
                    .map(|(s, d)| {
                        json!({
                            "source": states[s],
                            "rate": d.rate.to_fraction_string(),
                            "target": d.target.to_string(),
                            "multiplicity": d.multiplicity,
                        })
                    })
                    .collect();
                to_json(&json!({ "states": states, "actions": acts, "delays": dels }))
            }
            Format::Text => {
                let mut out = format!("{} states\n", sys.terms.len());
                for (s, a, t) in actions() {
                    let _ = writeln!(out, "{} --{a}--> {t}", sys.terms[s]);
                }
                for (s, d) in delays() {
                    let _ = writeln!(
                        out,
                        "{} ==({})==> {}  x{}",
                        sys.terms[s], d.rate, d.target, d.multiplicity
                    );
                }
                out
            }
            Format::Dot => {
                let mut out = String::from("digraph standard {\n  rankdir=LR;\n");
                for (s, t) in sys.terms.iter().enumerate() {
                    let _ = writeln!(out, "  s{s} [label=\"{}\"];", escape(&t.to_string()));
                }
                for (s, a, t) in actions() {
                    let _ = writeln!(out, "  s{s} -> s{} [label=\"{a}\"];", sys.index[t]);
                }
                for (s, d) in delays() {
                    let _ = writeln!(
                        out,
                        "  s{s} -> s{} [label=\"{} x{}\", style=dashed];",
                        sys.index[&d.target], d.rate, d.multiplicity
                    );
                }
                out.push_str("}\n");
                out
            }
        })
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn parse_doc<P: Front>(path: &Path) -> CmdResult<Document<P>> {
    let text = read(path)?;
    Document::parse(&text).map_err(|e| diagnostic(format!("{}:{e}", path.display())))
}

fn parse_model(path: &Path) -> CmdResult<FutsModel> {
    let text = read(path)?;
    FutsModel::from_json(&text).map_err(|e| diagnostic(format!("{}: {e}", path.display())))
}

/// The roots named on the command line, or the document's root.
fn roots_of<P: Front>(doc: &mut Document<P>, exprs: &[String]) -> CmdResult<Vec<Process<P>>> {
    if exprs.is_empty() {
        return match &doc.root {
            Some(r) => Ok(vec![r.clone()]),
            None => Err(usage("the file has no root expression; pass --root")),
        };
    }
    exprs
        .iter()
        .map(|e| {
            doc.parse_expression(e)
                .map_err(|err| diagnostic(format!("--root `{e}`: {err}")))
        })
        .collect()
}

fn semantic(e: SemanticsError) -> Report {
    diagnostic(e)
}

fn render_model(model: &FutsModel, format: Format) -> String {
    match format {
        Format::Json => to_json(&model.to_document()),
        Format::Dot => to_dot(model),
        Format::Text => model.to_string(),
    }
}

pub fn cmd_parse(path: &Path, common: &Common) -> CmdResult<Report> {
    fn render<P: Front>(path: &Path, format: Format) -> CmdResult<Report> {
        let doc = parse_doc::<P>(path)?;
        Ok(Report::ok(match format {
            Format::Json => to_json(&doc),
            _ => doc.to_string(),
        }))
    }
    match language(path, common.lang) {
        Lang::Pepa => render::<RatedAction>(path, common.format),
        Lang::Iml => render::<ImlPrefix>(path, common.format),
        Lang::Raw => Ok(Report::ok(render_model(&parse_model(path)?, common.format))),
    }
}

pub fn cmd_lts(
    path: &Path,
    common: &Common,
    roots: &[String],
    semantics: Semantics,
) -> CmdResult<Report> {
    fn go<P: Front>(
        path: &Path,
        common: &Common,
        exprs: &[String],
        semantics: Semantics,
    ) -> CmdResult<Report> {
        let mut doc = parse_doc::<P>(path)?;
        let roots = roots_of(&mut doc, exprs)?;
        let out = match semantics {
            Semantics::Futs => render_model(
                &P::explore(&roots, &doc, common.cap)
                    .map_err(semantic)?
                    .model,
                common.format,
            ),
            Semantics::Standard => {
                P::standard(&roots, &doc, common.cap, common.format).map_err(semantic)?
            }
        };
        Ok(Report::ok(out))
    }
    match language(path, common.lang) {
        Lang::Pepa => go::<RatedAction>(path, common, roots, semantics),
        Lang::Iml => go::<ImlPrefix>(path, common, roots, semantics),
        Lang::Raw => {
            if semantics == Semantics::Standard {
                return Err(usage("raw models have no standard semantics"));
            }
            Ok(Report::ok(render_model(&parse_model(path)?, common.format)))
        }
    }
}

#[derive(Serialize)]
struct WitnessStep {
    left: String,
    right: String,
    relation: usize,
    label: String,
    class: Vec<String>,
    left_value: String,
    right_value: String,
}

fn witness_steps(model: &FutsModel, w: &Witness) -> Vec<WitnessStep> {
    w.chain()
        .into_iter()
        .map(|w| WitnessStep {
            left: model.state_name(w.left).to_string(),
            right: model.state_name(w.right).to_string(),
            relation: w.relation,
            label: w.label.clone(),
            class: w
                .class
                .iter()
                .map(|&s| model.state_name(s).to_string())
                .collect(),
            left_value: w.left_value.to_string(),
            right_value: w.right_value.to_string(),
        })
        .collect()
}

fn verdict(model: &FutsModel, left: usize, right: usize, format: Format) -> Report {
    let partition = coarsest_bisimulation(model);
    let witness = distinguish(model, &partition, left, right);
    let same = partition.same_block(left, right);
    let stdout = match format {
        Format::Json => to_json(&json!({
            "verdict": if same { "bisimilar" } else { "not-bisimilar" },
            "left": model.state_name(left),
            "right": model.state_name(right),
            "witness": witness.as_ref().map(|w| witness_steps(model, w)),
        })),
        _ => match &witness {
            _ if same => "bisimilar\n".to_string(),
            Some(w) => format!("not-bisimilar\n{}", w.display(model)),
            None => "not-bisimilar\n".to_string(),
        },
    };
    Report {
        code: if same { EXIT_OK } else { EXIT_NOT_BISIMILAR },
        stdout,
        stderr: String::new(),
    }
}

pub fn cmd_bisim(path: &Path, common: &Common, roots: &[String]) -> CmdResult<Report> {
    fn go<P: Front>(path: &Path, common: &Common, exprs: &[String]) -> CmdResult<Report> {
        let mut doc = parse_doc::<P>(path)?;
        let mut roots = roots_of(&mut doc, exprs)?;
        if roots.len() == 1 {
            let first = roots_of(&mut doc, &[])?;
            roots.splice(0..0, first);
        }
        let explored = P::explore(&roots, &doc, common.cap).map_err(semantic)?;
        let left = explored.state_of(&roots[0]).expect("roots are explored");
        let right = explored.state_of(&roots[1]).expect("roots are explored");
        Ok(verdict(&explored.model, left, right, common.format))
    }
    if roots.len() > 2 {
        return Err(usage("bisim takes one or two --root values"));
    }
    match language(path, common.lang) {
        Lang::Pepa => go::<RatedAction>(path, common, roots),
        Lang::Iml => go::<ImlPrefix>(path, common, roots),
        Lang::Raw => {
            if roots.len() != 2 {
                return Err(usage("raw models need two --root state names"));
            }
            let model = parse_model(path)?;
            let id = |name: &str| {
                model
                    .state_id(name)
                    .ok_or_else(|| diagnostic(format!("unknown state `{name}`")))
            };
            let (left, right) = (id(&roots[0])?, id(&roots[1])?);
            Ok(verdict(&model, left, right, common.format))
        }
    }
}

fn minimized(model: &FutsModel, format: Format) -> CmdResult<Report> {
    let partition = coarsest_bisimulation(model);
    let q = quotient(model, &partition).map_err(diagnostic)?;
    let blocks = partition.to_names(model);
    Ok(Report::ok(match format {
        Format::Json => {
            #[derive(Serialize)]
            struct Minimized {
                partition: Vec<Vec<String>>,
                quotient: ModelDocument,
            }
            to_json(&Minimized {
                partition: blocks,
                quotient: q.to_document(),
            })
        }
        Format::Dot => to_dot(&q),
        Format::Text => {
            let mut out = format!("{} blocks\n", partition.len());
            for b in &blocks {
                let _ = writeln!(out, "  {{{}}}", b.join(", "));
            }
            out.push_str(&q.to_string());
            out
        }
    }))
}

pub fn cmd_minimize(path: &Path, common: &Common, roots: &[String]) -> CmdResult<Report> {
    fn go<P: Front>(path: &Path, common: &Common, exprs: &[String]) -> CmdResult<Report> {
        let mut doc = parse_doc::<P>(path)?;
        let roots = roots_of(&mut doc, exprs)?;
        let explored = P::explore(&roots, &doc, common.cap).map_err(semantic)?;
        minimized(&explored.model, common.format)
    }
    match language(path, common.lang) {
        Lang::Pepa => go::<RatedAction>(path, common, roots),
        Lang::Iml => go::<ImlPrefix>(path, common, roots),
        Lang::Raw => minimized(&parse_model(path)?, common.format),
    }
}

/// One line of an xcheck report.
#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub index: usize,
    pub case: String,
    #[serde(flatten)]
    pub outcome: Outcome,
}

/// Runs a check over corpus documents in parallel, keeping input order.
pub fn check_documents(check: Check, docs: &[String], cap: usize) -> Vec<CaseResult> {
    docs.par_iter()
        .enumerate()
        .map(|(index, text)| {
            let (case, outcome) = xcheck::check_document_text(check, text, cap);
            CaseResult {
                index,
                case,
                outcome,
            }
        })
        .collect()
}

/// Runs the totals check on `count` random triples per semiring.
pub fn check_totals(seed: u64, count: usize) -> Vec<CaseResult> {
    let mut rng = rng_from_seed(seed);
    let mut out = Vec::with_capacity(2 * count);
    for i in 0..count {
        let t = random_triple::<bool>(&mut rng);
        out.push(CaseResult {
            index: out.len(),
            case: format!("bool #{i}: {} and {}", t.phi, t.psi),
            outcome: xcheck::check_totals(&t),
        });
        let t = random_triple::<Rational>(&mut rng);
        out.push(CaseResult {
            index: out.len(),
            case: format!("rational #{i}: {} and {}", t.phi, t.psi),
            outcome: xcheck::check_totals(&t),
        });
    }
    out
}

fn random_documents(check: Check, random: &RandomArgs) -> Vec<String> {
    fn docs<P: RandomPrefix>(random: &RandomArgs) -> Vec<String> {
        random_corpus::<P>(random.seed, random.count, random.depth)
            .iter()
            .map(|d| d.to_string())
            .collect()
    }
    match check.language() {
        Some(xcheck::Language::Iml) => docs::<ImlPrefix>(random),
        _ => docs::<RatedAction>(random),
    }
}

pub fn cmd_xcheck(
    check: Check,
    file: Option<&Path>,
    common: &Common,
    random: &RandomArgs,
) -> CmdResult<Report> {
    let results = match (check, file) {
        (Check::Totals, Some(_)) => {
            return Err(usage(
                "the totals check draws random functions; omit the file",
            ))
        }
        (Check::Totals, None) => check_totals(random.seed, random.count),
        (_, Some(path)) => check_documents(check, &split_corpus(&read(path)?), common.cap),
        (_, None) => check_documents(check, &random_documents(check, random), common.cap),
    };
    let tally: Tally = results.iter().map(|r| &r.outcome).collect();
    let stdout = match common.format {
        Format::Json => {
            to_json(&json!({ "check": check.name(), "results": results, "summary": tally }))
        }
        _ => {
            let mut out = String::new();
            for r in &results {
                let _ = writeln!(out, "#{} {}: {}", r.index, r.outcome, r.case);
            }
            let _ = writeln!(out, "{check}: {tally}");
            out
        }
    };
    Ok(Report {
        code: if tally.failed == 0 {
            EXIT_OK
        } else {
            EXIT_DIAGNOSTIC
        },
        stdout,
        stderr: String::new(),
    })
}

pub fn cmd_gen(lang: Lang, random: &RandomArgs) -> CmdResult<Report> {
    Ok(Report::ok(match lang {
        Lang::Pepa => render_corpus(&random_corpus::<RatedAction>(
            random.seed,
            random.count,
            random.depth,
        )),
        Lang::Iml => render_corpus(&random_corpus::<ImlPrefix>(
            random.seed,
            random.count,
            random.depth,
        )),
        Lang::Raw => return Err(usage("gen produces terms; choose --lang pepa or iml")),
    }))
}
