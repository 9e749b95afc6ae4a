//! Command-line front end. [`run`] does all the work and returns what should
//! be printed, so the binary is a thin wrapper and tests can drive it
//! in-process.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::engine::{eval_oracle, EvalContext, Optimizations};
use crate::formula::{parse_formula, Atom, Formula, Op};
use crate::graph::{build_rg, BuildOptions, GraphError, ReachabilityGraph};
use crate::model::{parse_model, Network};
use crate::reduction::{project_sequence, reduce, surviving_states};
use crate::tree::{build_tree, compress, CriticalTree};
use crate::views::{self, render, render_compressed, seqdiag, ViewKind};

pub const EXIT_TRUE: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;
pub const EXIT_INTERNAL: i32 = 4;

pub const REDUCED_ADVISORY: &str = "a counterexample over the reduced state space omits the states the reduction \
skipped; evaluate the formula again over the original state space (drop --reduced) to see the full sequence";

#[derive(Debug, Parser)]
#[command(name = "csmcheck", version, about = "Model checker for communicating state machines with critical-tree counterexamples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate a formula and, when it is false, print its critical tree.
    Check(CheckArgs),
    /// Print the sequence-diagram listing of one node's sequence.
    Seqdiag(SeqdiagArgs),
    /// Compare critical sequences over the original and the reduced state space.
    ReduceReport(ReportArgs),
}

#[derive(Debug, Args)]
struct Source {
    /// Model file.
    #[arg(long)]
    model: PathBuf,
    /// Formula text.
    #[arg(long, conflicts_with = "formula_file", required_unless_present = "formula_file")]
    formula: Option<String>,
    /// File holding the formula.
    #[arg(long)]
    formula_file: Option<PathBuf>,
    /// Abort when the state space grows beyond this many states.
    #[arg(long, default_value_t = BuildOptions::default().state_cap)]
    cap: usize,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    source: Source,
    /// states, automata, signals or xml.
    #[arg(long, default_value = "states", value_parser = parse_tree_view)]
    view: ViewKind,
    /// Print the compressed tree instead of the chosen view.
    #[arg(long)]
    compress: bool,
    /// Evaluate over the stutter-reduced state space.
    #[arg(long)]
    reduced: bool,
    /// With --reduced: print the tree even though it is over the reduced space.
    #[arg(long, requires = "reduced")]
    force: bool,
    /// Reduction atoms (defaults to the atoms of the formula).
    #[arg(long = "atom")]
    atoms: Vec<String>,
    /// Cross-check the verdict with the fixed-point evaluator.
    #[arg(long)]
    oracle: bool,
    /// Write the document here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SeqdiagArgs {
    /// Replay a previously written XML tree.
    #[arg(long, conflicts_with_all = ["model", "formula", "formula_file"])]
    xml: Option<PathBuf>,
    #[arg(long, required_unless_present = "xml")]
    model: Option<PathBuf>,
    #[arg(long, conflicts_with = "formula_file")]
    formula: Option<String>,
    #[arg(long)]
    formula_file: Option<PathBuf>,
    #[arg(long, default_value_t = BuildOptions::default().state_cap)]
    cap: usize,
    /// Formula node whose sequence is listed.
    #[arg(long)]
    node: u32,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    #[command(flatten)]
    source: Source,
    #[arg(long = "atom")]
    atoms: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_tree_view(s: &str) -> Result<ViewKind, String> {
    match s.parse::<ViewKind>()? {
        ViewKind::SeqDiagram => Err("use the seqdiag command for sequence-diagram listings".into()),
        v => Ok(v),
    }
}

/// What a command produced.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }
}

type Step<T> = Result<T, Failure>;

fn read(path: &Path) -> Step<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Step<Network> {
    parse_model(&read(path)?).map_err(|e| Failure::usage(format!("{}:{e}", path.display())))
}

fn load_formula(net: &Network, inline: Option<&str>, file: Option<&Path>) -> Step<Formula> {
    let (text, origin) = match (inline, file) {
        (Some(t), _) => (t.to_string(), "formula".to_string()),
        (None, Some(p)) => (read(p)?, p.display().to_string()),
        (None, None) => return Err(Failure::usage("give --formula or --formula-file")),
    };
    parse_formula(&text, Some(net)).map_err(|e| Failure::usage(format!("{origin}:{e}")))
}

fn graph(net: &Network, cap: usize) -> Step<ReachabilityGraph> {
    build_rg(net, BuildOptions { state_cap: cap }).map_err(|e| match e {
        GraphError::StateCapExceeded { .. } => Failure { code: EXIT_CAP, message: e.to_string() },
        other => Failure::usage(other.to_string()),
    })
}

fn reduction_atoms(net: &Network, f: &Formula, given: &[String]) -> Step<BTreeSet<Atom>> {
    if given.is_empty() {
        return Ok(f.free_atoms());
    }
    let mut out = BTreeSet::new();
    for text in given {
        let a = parse_formula(text, Some(net)).map_err(|e| Failure::usage(format!("--atom {text:?}: {e}")))?;
        match a.op(a.root()) {
            Op::AtomSignal(x) => out.insert(Atom::Signal(x.clone())),
            Op::AtomIn(d) => out.insert(Atom::In(d.clone())),
            _ => return Err(Failure::usage(format!("--atom {text:?}: expected a signal or `in A.p`"))),
        };
    }
    Ok(out)
}

/// Verdict at the initial state, optionally cross-checked.
fn verdict(rg: &ReachabilityGraph, f: &Formula, oracle: bool, notes: &mut String) -> Step<bool> {
    let mut cx = EvalContext::new(rg, f, Optimizations::ALL).map_err(|e| Failure::usage(e.to_string()))?;
    let v = cx.eval(rg.initial()).map_err(|e| Failure::usage(e.to_string()))?;
    for d in cx.diagnostics() {
        writeln!(notes, "note: {d}").unwrap();
    }
    if oracle {
        let o = eval_oracle(rg, f, rg.initial()).map_err(|e| Failure::usage(e.to_string()))?;
        if o != v {
            return Err(Failure {
                code: EXIT_INTERNAL,
                message: format!("oracle mismatch: sphere engine says {v}, fixed-point evaluator says {o}"),
            });
        }
        writeln!(notes, "note: fixed-point evaluator agrees").unwrap();
    }
    Ok(v)
}

fn tree(rg: &ReachabilityGraph, f: &Formula) -> Step<CriticalTree> {
    build_tree(rg, f, rg.initial()).map_err(|e| Failure { code: EXIT_INTERNAL, message: e.to_string() })
}

fn emit(out: &Option<PathBuf>, doc: String, o: &mut Outcome) -> Step<()> {
    match out {
        Some(p) => std::fs::write(p, doc).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
        None => {
            o.stdout.push_str(&doc);
            Ok(())
        }
    }
}

fn verdict_word(v: bool) -> &'static str {
    if v {
        "TRUE"
    } else {
        "FALSE"
    }
}

fn check(a: CheckArgs, o: &mut Outcome) -> Step<i32> {
    let net = load_model(&a.source.model)?;
    let f = load_formula(&net, a.source.formula.as_deref(), a.source.formula_file.as_deref())?;
    let full = graph(&net, a.source.cap)?;
    let reduced;
    let rg = if a.reduced {
        let atoms = reduction_atoms(&net, &f, &a.atoms)?;
        reduced = reduce(&full, &atoms).map_err(|e| Failure::usage(e.to_string()))?;
        for d in &reduced.diagnostics {
            writeln!(o.stderr, "note: {d}").unwrap();
        }
        if f.has_next() {
            writeln!(o.stderr, "warning: the reduction does not preserve next-step operators").unwrap();
        }
        reduced.quotient()
    } else {
        &full
    };
    let v = verdict(rg, &f, a.oracle, &mut o.stderr)?;
    if v {
        o.stdout.push_str("TRUE\n");
        return Ok(EXIT_TRUE);
    }
    if a.reduced && !a.force {
        o.stdout.push_str("FALSE\n");
        return Err(Failure::usage(format!(
            "refusing to print a critical tree over the reduced state space: {REDUCED_ADVISORY}; pass --force to print it anyway"
        )));
    }
    let t = tree(rg, &f)?;
    let doc = if a.compress { render_compressed(&compress(&t), rg) } else { render(a.view, &t, rg).text };
    if a.reduced {
        writeln!(o.stderr, "warning: {REDUCED_ADVISORY}").unwrap();
    }
    if a.out.is_some() {
        o.stdout.push_str("FALSE\n");
    } else {
        o.stderr.push_str("FALSE\n");
    }
    emit(&a.out, doc, o)?;
    Ok(EXIT_FALSE)
}

fn seqdiag_cmd(a: SeqdiagArgs, o: &mut Outcome) -> Step<i32> {
    let doc = if let Some(path) = &a.xml {
        views::xml::parse(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?
    } else {
        let model = a.model.as_deref().expect("clap requires --model without --xml");
        let net = load_model(model)?;
        let f = load_formula(&net, a.formula.as_deref(), a.formula_file.as_deref())?;
        let rg = graph(&net, a.cap)?;
        if verdict(&rg, &f, false, &mut o.stderr)? {
            o.stdout.push_str("TRUE\n");
            return Ok(EXIT_TRUE);
        }
        views::xml::document(&tree(&rg, &f)?, &rg)
    };
    let listing = seqdiag::render_from_document(&doc, a.node).map_err(|e| Failure::usage(e.to_string()))?;
    emit(&a.out, listing, o)?;
    Ok(EXIT_FALSE)
}

fn report(a: ReportArgs, o: &mut Outcome) -> Step<i32> {
    let net = load_model(&a.source.model)?;
    let f = load_formula(&net, a.source.formula.as_deref(), a.source.formula_file.as_deref())?;
    let rg = graph(&net, a.source.cap)?;
    let atoms = reduction_atoms(&net, &f, &a.atoms)?;
    let red = reduce(&rg, &atoms).map_err(|e| Failure::usage(e.to_string()))?;
    let q = red.quotient();
    let original = verdict(&rg, &f, false, &mut o.stderr)?;
    let reduced = verdict(q, &f, false, &mut o.stderr)?;

    let mut doc = String::new();
    let names: Vec<String> = red.atoms.iter().map(Atom::to_string).collect();
    writeln!(doc, "formula: {f}").unwrap();
    writeln!(doc, "reduction atoms: {}", if names.is_empty() { "(none)".to_string() } else { names.join(", ") }).unwrap();
    writeln!(doc, "original space: {} states, {} arcs", rg.num_states(), rg.num_arcs()).unwrap();
    writeln!(doc, "reduced space: {} states, {} arcs", q.num_states(), q.num_arcs()).unwrap();
    writeln!(doc, "verdict over original space: {}", verdict_word(original)).unwrap();
    writeln!(doc, "verdict over reduced space: {}", verdict_word(reduced)).unwrap();
    if f.has_next() {
        writeln!(doc, "warning: the reduction does not preserve next-step operators").unwrap();
    }
    if !original {
        let t = tree(&rg, &f)?;
        let ids = |v: &[crate::graph::StateId]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(" ");
        for e in t.constructed().filter(|e| e.states.len() > 1) {
            let projected = project_sequence(&e.states, &red);
            let kept = surviving_states(&e.states, &red);
            writeln!(doc).unwrap();
            writeln!(doc, "node {} ({})", e.node, t.formula.op(e.node).heading()).unwrap();
            writeln!(doc, "  original sequence ({} states): {}", e.states.len(), ids(&e.states)).unwrap();
            writeln!(doc, "  reduced sequence ({} states): {}", projected.len(), ids(&kept)).unwrap();
            writeln!(doc, "  original listing:").unwrap();
            for line in seqdiag::render_states_listing(&rg, &e.states).lines() {
                writeln!(doc, "    {line}").unwrap();
            }
            writeln!(doc, "  reduced listing:").unwrap();
            for line in seqdiag::render_states_listing(&rg, &kept).lines() {
                writeln!(doc, "    {line}").unwrap();
            }
        }
    }
    writeln!(doc).unwrap();
    writeln!(doc, "advisory: {REDUCED_ADVISORY}").unwrap();
    emit(&a.out, doc, o)?;
    Ok(if original { EXIT_TRUE } else { EXIT_FALSE })
}

/// Runs one command line (including the program name).
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let mut o = Outcome::default();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                o.code = EXIT_USAGE;
                o.stderr = text;
            } else {
                o.stdout = text;
            }
            return o;
        }
    };
    let r = match cli.command {
        Command::Check(a) => check(a, &mut o),
        Command::Seqdiag(a) => seqdiag_cmd(a, &mut o),
        Command::ReduceReport(a) => report(a, &mut o),
    };
    match r {
        Ok(code) => o.code = code,
        Err(f) => {
            o.code = f.code;
            writeln!(o.stderr, "error: {}", f.message).unwrap();
        }
    }
    o
}
