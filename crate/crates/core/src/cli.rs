//! Command-line front end. Exit codes: 0 success, 1 counterexample found or
//! property violated, 2 usage or input error.

use std::collections::BTreeSet;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analysis::{
    bounded_equiv, duality_check, is_existentially_closed_in, minimal_cores, pce_counterexample_at,
    pce_counterexample_search, psc_counterexample_search, CounterexampleReport,
};
use crate::corpus::{gen_sentence, gen_structure, gen_theory, SentenceFamily, StructureFamily, TheoryFamily};
use crate::error::{Error, Result};
use crate::eval::eval;
use crate::logic::{Assignment, FiniteStructure, Formula, Theory, Vocabulary};
use crate::normal::{relativize, to_prenex};
use crate::par::ExecMode;
use crate::report::{render_report, Format, Report};
use crate::substructure::SearchBudget;
use crate::syntax::{parse_formula, parse_structures, parse_theory, print_formula, print_structure_file};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FOUND: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "preslab", version, about = "Cores, covers and prefix classes of first-order sentences on finite structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
    /// Worker threads for searches; 1 runs the sequential path.
    #[arg(long, default_value_t = 0)]
    pub jobs: usize,
    /// Include wall-clock timings in reports.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct Inputs {
    /// Corpus family such as `cycle(4)`, or a structure name from --structures.
    #[arg(long)]
    pub structure: Option<String>,
    /// Structure file.
    #[arg(long)]
    pub structures: Option<PathBuf>,
    /// Formula text or sentence family such as `has_3_cycle`.
    #[arg(long)]
    pub sentence: Option<String>,
    /// Theory family such as `loop_contrast`, or `;`-separated sentences.
    #[arg(long)]
    pub theory: Option<String>,
    #[arg(long)]
    pub theory_file: Option<PathBuf>,
    /// `graph`, `empty`, or a symbol list such as `E/2,P/1,c0`.
    #[arg(long)]
    pub vocab: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct Bounds {
    /// Core or cover size bound: a number or `finite`.
    #[arg(long, default_value = "3")]
    pub k: String,
    #[arg(long, default_value_t = 4)]
    pub max_size: usize,
    /// Wall-clock budget in seconds.
    #[arg(long)]
    pub time_budget: Option<f64>,
    #[arg(long)]
    pub no_dedup: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a formula in a structure.
    Eval {
        #[command(flatten)]
        inputs: Inputs,
        /// Assignment such as `x=a,y=b`.
        #[arg(long)]
        assign: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Prenex prefix class of a formula.
    Classify {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        output: Output,
    },
    /// Prenex normal form of a formula.
    Prenex {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        output: Output,
    },
    /// Relativize a sentence to fresh variables.
    Relativize {
        #[command(flatten)]
        inputs: Inputs,
        /// Comma-separated fresh variables.
        #[arg(long, default_value = "")]
        vars: String,
        #[command(flatten)]
        output: Output,
    },
    /// Cores of a structure up to size k.
    Cores {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        bounds: Bounds,
        /// Elements for the free variables of the theory, in sorted variable order.
        #[arg(long)]
        params: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// A k-ary cover of a structure by models of a sentence it falsifies.
    Covers {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        bounds: Bounds,
        #[command(flatten)]
        output: Output,
    },
    /// Search for a model without a core of size at most k.
    PscSearch {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        bounds: Bounds,
        #[command(flatten)]
        output: Output,
    },
    /// Search for a non-model with a k-ary cover by models.
    PceSearch {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        bounds: Bounds,
        #[command(flatten)]
        output: Output,
    },
    /// Check the core/cover duality structure by structure.
    DualityTest {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        bounds: Bounds,
        #[command(flatten)]
        output: Output,
    },
    /// Bounded equivalence of two sentences.
    Equiv {
        #[command(flatten)]
        inputs: Inputs,
        /// The second sentence.
        #[arg(long)]
        other: String,
        #[command(flatten)]
        bounds: Bounds,
        #[command(flatten)]
        output: Output,
    },
    /// Whether one structure is existentially closed in another.
    EcCheck {
        /// The substructure (name in --structures or corpus family).
        #[arg(long)]
        sub: String,
        /// The extension.
        #[arg(long)]
        sup: String,
        #[arg(long)]
        structures: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Print a corpus structure, sentence or theory.
    Gen {
        #[command(flatten)]
        inputs: Inputs,
    },
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    EXIT_OK
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli.command) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn format_of(o: &Output) -> Format {
    match o.format {
        OutputFormat::Text => Format::Text,
        OutputFormat::Json => Format::Json,
    }
}

fn json_line(v: serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("plain JSON values");
    s.push('\n');
    s
}

struct Context {
    vocab: Arc<Vocabulary>,
    file: Option<Vec<FiniteStructure>>,
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidParams(format!("cannot read {}: {e}", path.display())))
}

pub fn parse_vocab_spec(spec: &str) -> Result<Vocabulary> {
    match spec {
        "graph" => return Ok(Vocabulary::graph()),
        "empty" => return Ok(Vocabulary::empty()),
        _ => {}
    }
    let mut relations = Vec::new();
    let mut constants = Vec::new();
    for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('/') {
            Some((name, arity)) => {
                let arity = arity
                    .parse()
                    .map_err(|_| Error::InvalidVocabulary(format!("bad arity in `{part}`")))?;
                relations.push((name.to_string(), arity));
            }
            None => constants.push(part.to_string()),
        }
    }
    Vocabulary::new("custom", relations, constants)
}

fn context(inputs: &Inputs, file: Option<&PathBuf>) -> Result<Context> {
    let path = inputs.structures.as_ref().or(file);
    let (file_vocab, file) = match path {
        Some(p) => {
            let (v, s) = parse_structures(&read(p)?)?;
            (Some(v), Some(s))
        }
        None => (None, None),
    };
    let vocab = match (&inputs.vocab, file_vocab) {
        (Some(spec), Some(v)) => {
            let given = parse_vocab_spec(spec)?;
            if !given.same_symbols(&v) {
                return Err(Error::VocabularyMismatch(
                    "--vocab differs from the structure file".into(),
                ));
            }
            v
        }
        (Some(spec), None) => parse_vocab_spec(spec)?,
        (None, Some(v)) => v,
        (None, None) => Vocabulary::graph(),
    };
    Ok(Context {
        vocab: Arc::new(vocab),
        file,
    })
}

fn structure_named(ctx: &Context, name: Option<&str>) -> Result<FiniteStructure> {
    if let Some(list) = &ctx.file {
        return match name {
            Some(n) => list
                .iter()
                .find(|s| s.name() == n)
                .cloned()
                .ok_or_else(|| Error::InvalidParams(format!("no structure named `{n}` in the file"))),
            None if list.len() == 1 => Ok(list[0].clone()),
            None => Err(Error::InvalidParams(
                "the structure file has several structures; pick one with --structure".into(),
            )),
        };
    }
    let name = name.ok_or_else(|| Error::InvalidParams("missing --structure".into()))?;
    gen_structure(&name.parse::<StructureFamily>()?)
}

fn formula_arg(text: &str, vocab: &Vocabulary) -> Result<Formula> {
    match parse_formula(text, vocab) {
        Ok(f) => Ok(f),
        Err(parse_err) => match text.parse::<SentenceFamily>() {
            Ok(fam) => {
                let f = gen_sentence(&fam)?;
                f.check(vocab)?;
                Ok(f)
            }
            Err(_) => Err(parse_err.into()),
        },
    }
}

fn sentence(inputs: &Inputs, vocab: &Vocabulary) -> Result<Formula> {
    let text = inputs
        .sentence
        .as_deref()
        .ok_or_else(|| Error::InvalidParams("missing --sentence".into()))?;
    formula_arg(text, vocab)
}

/// Formulas of the theory, possibly with free variables.
fn theory_formulas(inputs: &Inputs, vocab: &Vocabulary) -> Result<Vec<Formula>> {
    if let Some(path) = &inputs.theory_file {
        return Ok(parse_theory(&read(path)?, vocab)?.sentences().to_vec());
    }
    if let Some(t) = &inputs.theory {
        if let Ok(fam) = t.parse::<TheoryFamily>() {
            let th = gen_theory(&fam)?;
            th.check(vocab)?;
            return Ok(th.sentences().to_vec());
        }
        return Ok(parse_theory(t, vocab)?.sentences().to_vec());
    }
    if inputs.sentence.is_some() {
        return Ok(vec![sentence(inputs, vocab)?]);
    }
    Err(Error::InvalidParams("missing --sentence, --theory or --theory-file".into()))
}

fn theory(inputs: &Inputs, vocab: &Vocabulary) -> Result<Theory> {
    Theory::new(theory_formulas(inputs, vocab)?)
}

fn parse_k(k: &str) -> Result<usize> {
    if k == "finite" {
        return Ok(usize::MAX);
    }
    k.parse()
        .map_err(|_| Error::InvalidParams(format!("--k must be a number or `finite`, got `{k}`")))
}

fn budget(bounds: &Bounds, output: &Output) -> SearchBudget {
    let exec = if output.jobs == 1 { ExecMode::Sequential } else { ExecMode::Parallel };
    SearchBudget::new(bounds.max_size)
        .with_dedup(!bounds.no_dedup)
        .with_seconds(bounds.time_budget)
        .with_exec(exec)
}

/// Runs `f` on a pool with the requested number of threads (0 = default).
fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    #[cfg(feature = "parallel")]
    {
        if jobs > 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::InvalidParams(format!("cannot start {jobs} workers: {e}")))?;
            return Ok(pool.install(f));
        }
    }
    let _ = jobs;
    Ok(f())
}

fn search_output(mut report: CounterexampleReport, output: &Output) -> (String, i32) {
    if !output.timing {
        report.elapsed_ms = None;
    }
    let code = if report.found() { EXIT_FOUND } else { EXIT_OK };
    (render_report(Report::Counterexample(&report), format_of(output)), code)
}

fn execute(cmd: &Command) -> Result<(String, i32)> {
    match cmd {
        Command::Eval { inputs, assign, output } => {
            let ctx = context(inputs, None)?;
            let m = structure_named(&ctx, inputs.structure.as_deref())?;
            let f = sentence(inputs, m.vocab())?;
            let mut asg = Assignment::new();
            for pair in assign.iter().flat_map(|a| a.split(',')).filter(|p| !p.trim().is_empty()) {
                let (v, e) = pair
                    .split_once('=')
                    .ok_or_else(|| Error::InvalidParams(format!("bad assignment `{pair}`")))?;
                asg.insert(v.trim(), e.trim());
            }
            let value = eval(&m, &f, &asg)?;
            Ok(match format_of(output) {
                Format::Json => (
                    json_line(json!({"query": "eval", "structure": m.name(), "formula": f.to_string(), "value": value})),
                    EXIT_OK,
                ),
                Format::Text => (format!("{value}\n"), EXIT_OK),
            })
        }
        Command::Classify { inputs, output } => {
            let ctx = context(inputs, None)?;
            let f = sentence(inputs, &ctx.vocab)?;
            let pf = to_prenex(&f);
            let class = pf.class();
            Ok(match format_of(output) {
                Format::Json => (
                    json_line(json!({"query": "classify", "formula": f.to_string(), "prenex": pf.to_string(), "class": class, "summary": class.to_string()})),
                    EXIT_OK,
                ),
                Format::Text => (format!("{class}\nprenex: {pf}\n"), EXIT_OK),
            })
        }
        Command::Prenex { inputs, output } => {
            let ctx = context(inputs, None)?;
            let f = sentence(inputs, &ctx.vocab)?;
            let pf = to_prenex(&f);
            Ok(match format_of(output) {
                Format::Json => (
                    json_line(json!({"query": "prenex", "formula": f.to_string(), "prenex": pf.to_string()})),
                    EXIT_OK,
                ),
                Format::Text => (format!("{pf}\n"), EXIT_OK),
            })
        }
        Command::Relativize { inputs, vars, output } => {
            let ctx = context(inputs, None)?;
            let f = sentence(inputs, &ctx.vocab)?;
            let vars: Vec<&str> = vars.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
            let r = relativize(&f, &vars, &ctx.vocab)?;
            Ok(match format_of(output) {
                Format::Json => (
                    json_line(json!({"query": "relativize", "formula": f.to_string(), "vars": vars, "result": print_formula(&r)})),
                    EXIT_OK,
                ),
                Format::Text => (format!("{}\n", print_formula(&r)), EXIT_OK),
            })
        }
        Command::Cores { inputs, bounds, params, output } => {
            let ctx = context(inputs, None)?;
            let m = structure_named(&ctx, inputs.structure.as_deref())?;
            let formulas = theory_formulas(inputs, m.vocab())?;
            let (m, t) = ground(&m, &formulas, params.as_deref())?;
            let report = minimal_cores(&m, &t, parse_k(&bounds.k)?)?;
            let code = if report.is_psc_witness_failure { EXIT_FOUND } else { EXIT_OK };
            Ok((render_report(Report::Cores(&report), format_of(output)), code))
        }
        Command::Covers { inputs, bounds, output } => {
            let ctx = context(inputs, None)?;
            let m = structure_named(&ctx, inputs.structure.as_deref())?;
            let f = sentence(inputs, m.vocab())?;
            let report = pce_counterexample_at(&f, parse_k(&bounds.k)?, &m)?;
            let code = if report.cover.is_some() { EXIT_FOUND } else { EXIT_OK };
            Ok((render_report(Report::Cover(&report), format_of(output)), code))
        }
        Command::PscSearch { inputs, bounds, output } => {
            let ctx = context(inputs, None)?;
            let t = theory(inputs, &ctx.vocab)?;
            let (k, b) = (parse_k(&bounds.k)?, budget(bounds, output));
            let report = with_jobs(output.jobs, || psc_counterexample_search(&t, ctx.vocab.clone(), k, &b))??;
            Ok(search_output(report, output))
        }
        Command::PceSearch { inputs, bounds, output } => {
            let ctx = context(inputs, None)?;
            let f = sentence(inputs, &ctx.vocab)?;
            let (k, b) = (parse_k(&bounds.k)?, budget(bounds, output));
            let report = with_jobs(output.jobs, || pce_counterexample_search(&f, ctx.vocab.clone(), k, &b))??;
            Ok(search_output(report, output))
        }
        Command::DualityTest { inputs, bounds, output } => {
            let ctx = context(inputs, None)?;
            let f = sentence(inputs, &ctx.vocab)?;
            let (k, b) = (parse_k(&bounds.k)?, budget(bounds, output));
            let report = with_jobs(output.jobs, || duality_check(&f, ctx.vocab.clone(), k, &b))??;
            Ok(search_output(report, output))
        }
        Command::Equiv { inputs, other, bounds, output } => {
            let ctx = context(inputs, None)?;
            let f = sentence(inputs, &ctx.vocab)?;
            let g = formula_arg(other, &ctx.vocab)?;
            let b = budget(bounds, output);
            let report = with_jobs(output.jobs, || bounded_equiv(&f, &g, ctx.vocab.clone(), &b))??;
            Ok(search_output(report, output))
        }
        Command::EcCheck { sub, sup, structures, output } => {
            let inputs = Inputs {
                structure: None,
                structures: structures.clone(),
                sentence: None,
                theory: None,
                theory_file: None,
                vocab: None,
            };
            let ctx = context(&inputs, None)?;
            let m = structure_named(&ctx, Some(sub))?;
            let r = structure_named(&ctx, Some(sup))?;
            let value = is_existentially_closed_in(&m, &r)?;
            let code = if value { EXIT_OK } else { EXIT_FOUND };
            Ok(match format_of(output) {
                Format::Json => (
                    json_line(json!({"query": "ec", "sub": m.name(), "sup": r.name(), "existentially_closed": value})),
                    code,
                ),
                Format::Text => (format!("{value}\n"), code),
            })
        }
        Command::Gen { inputs } => {
            if let Some(s) = &inputs.structure {
                let m = gen_structure(&s.parse::<StructureFamily>()?)?;
                return Ok((print_structure_file(m.vocab(), std::slice::from_ref(&m)), EXIT_OK));
            }
            if let Some(s) = &inputs.sentence {
                let f = gen_sentence(&s.parse::<SentenceFamily>()?)?;
                return Ok((format!("{}\n", print_formula(&f)), EXIT_OK));
            }
            if let Some(t) = &inputs.theory {
                let th = gen_theory(&t.parse::<TheoryFamily>()?)?;
                let lines: Vec<String> = th.sentences().iter().map(print_formula).collect();
                return Ok((format!("{}\n", lines.join(";\n")), EXIT_OK));
            }
            Err(Error::InvalidParams("gen needs --structure, --sentence or --theory".into()))
        }
    }
}

/// Replaces the free variables of `formulas` (in sorted order) by fresh
/// constants interpreted as `params`.
fn ground(m: &FiniteStructure, formulas: &[Formula], params: Option<&str>) -> Result<(FiniteStructure, Theory)> {
    let free: BTreeSet<String> = formulas.iter().flat_map(|f| f.free_variables()).collect();
    let elems: Vec<&str> = params
        .map(|p| p.split(',').map(str::trim).filter(|e| !e.is_empty()).collect())
        .unwrap_or_default();
    if free.len() != elems.len() {
        return Err(Error::InvalidParams(format!(
            "the theory has free variables {free:?}; --params must list {} elements",
            free.len()
        )));
    }
    if free.is_empty() {
        return Ok((m.clone(), Theory::new(formulas.to_vec())?));
    }
    let vars: Vec<&str> = free.iter().map(String::as_str).collect();
    let (_, t) = Theory::ground_free_variables(formulas, &vars, m.vocab())?;
    Ok((m.expand_with_parameters(&elems)?, t))
}
