//! Command-line front end. [`run`] takes the argument vector and output
//! streams and returns the process exit status.
//!
//! Exit status: 0 on success; for `analyze`, 0 Covered, 1 TooShort,
//! 2 TooLong, 3 Out; 1 when `diff` finds a difference or `concordance` a
//! mismatch; 64 for usage errors, 65 for malformed models or traces,
//! 66 for unreadable files, 70 when a resource cap is exceeded.

use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use interkernel::analysis::{analyze, Verdict};
use interkernel::denotational::sigma_u_capped;
use interkernel::dsl::{
    parse_interaction, parse_interaction_permissive, parse_trace, parse_trace_lines, parse_trace_permissive, Trace,
    EMPTY_TRACE_MARKER,
};
use interkernel::harness::{
    bench_trace_analysis, bench_tsv, concordance, count_by_depth, diff_semantics_capped, enumerate,
    generate_concurrent_traces, generate_mutants, mqtt_model, sample_interactions, ConcordanceConfig, EnumSpec,
    MutantPlan, DEFAULT_TRACE_CAP,
};
use interkernel::operational::{execute, prune, sigma_o_capped, steps};
use interkernel::{Error, Interaction, Position, Signature};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub const EXIT_USAGE: i32 = 64;
pub const EXIT_DATA: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_LIMIT: i32 = 70;

/// Environment variable that takes precedence over `--seed`.
pub const SEED_VAR: &str = "INTERKERNEL_SEED";

#[derive(Parser, Debug)]
#[command(
    name = "interkernel",
    version,
    about = "Semantics, execution and trace analysis for interaction terms",
    after_help = "analyze exits with 0 (Covered), 1 (TooShort), 2 (TooLong) or 3 (Out).\n\
                  Usage errors exit with 64, malformed input with 65, unreadable files with 66."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a model and print it canonically
    Parse(ModelArgs),
    /// Print the traces of a model up to a loop budget
    Semantics {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum, default_value_t = Method::Operational)]
        method: Method,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long, default_value_t = DEFAULT_TRACE_CAP)]
        cap: usize,
    },
    /// Print the frontier positions of a model
    Frontier(ModelArgs),
    /// Execute the action at a frontier position
    Step {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, short = 'p')]
        position: String,
    },
    /// Remove every action on a lifeline, where possible
    Prune {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, short = 'l')]
        lifeline: String,
    },
    /// Analyze traces against a model
    Analyze {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        trace: TraceArgs,
        /// Also print the positions executed by the witness derivation
        #[arg(long)]
        witness: bool,
    },
    /// Compare the unfolding and operational semantics
    Diff {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 4)]
        bound: usize,
        #[arg(long, default_value_t = DEFAULT_TRACE_CAP)]
        cap: usize,
    },
    /// Enumerate terms by depth
    Enumerate {
        #[command(flatten)]
        space: SpaceArgs,
        /// Print only the number of terms of each depth
        #[arg(long)]
        count_only: bool,
    },
    /// Generate mutant traces with their expected verdicts
    Mutate {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 3)]
        bound: usize,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Time the analysis of every prefix of concurrent traces
    Bench {
        /// Model text; the bundled client/broker model when omitted
        #[arg(long, short = 'm')]
        model: Option<String>,
        #[arg(long)]
        model_file: Option<PathBuf>,
        /// Trace file to analyze instead of generated traces
        #[arg(long)]
        trace_file: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        instances: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Compare the analyzer with the oracle on sampled models
    Concordance {
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long, default_value_t = 100)]
        models: usize,
        #[arg(long, default_value_t = 3)]
        bound: usize,
        /// Write mismatches as JSON lines to this file
        #[arg(long)]
        mismatches: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Tsv)]
        format: Format,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Debug)]
struct ModelArgs {
    /// Model text
    #[arg(
        long,
        short = 'm',
        required_unless_present = "model_file",
        conflicts_with = "model_file"
    )]
    model: Option<String>,
    /// File holding the model text
    #[arg(long)]
    model_file: Option<PathBuf>,
    /// Signature `l1,l2,...:m1,m2,...`; inferred when omitted
    #[arg(long)]
    sig: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct TraceArgs {
    /// Trace text, actions separated by `.`
    #[arg(
        long,
        short = 't',
        required_unless_present = "trace_file",
        conflicts_with = "trace_file"
    )]
    trace: Option<String>,
    /// File with one trace per line
    #[arg(long)]
    trace_file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SpaceArgs {
    #[arg(long, default_value_t = 1)]
    lifelines: usize,
    #[arg(long, default_value_t = 1)]
    messages: usize,
    #[arg(long, default_value_t = 3)]
    depth: usize,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Seed; overridden by INTERKERNEL_SEED
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Method {
    Unfold,
    Operational,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Text,
    Tsv,
    Jsonl,
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceLimit { .. } => EXIT_LIMIT,
            Error::InvalidArgument(_) | Error::NotInFrontier(_) | Error::PositionOutOfRange(_) => EXIT_USAGE,
            _ => EXIT_DATA,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_NO_INPUT,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

type CliResult = Result<i32, Failure>;

/// Runs the command line `args` (program name first).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            if informational {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let _ = write!(err, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> CliResult {
    match command {
        Command::Parse(m) => cmd_parse(&m, out),
        Command::Semantics {
            model,
            method,
            bound,
            cap,
        } => cmd_semantics(&model, method, bound, cap, out),
        Command::Frontier(m) => cmd_frontier(&m, out),
        Command::Step { model, position } => cmd_step(&model, &position, out),
        Command::Prune { model, lifeline } => cmd_prune(&model, &lifeline, out),
        Command::Analyze { model, trace, witness } => cmd_analyze(&model, &trace, witness, out),
        Command::Diff { model, bound, cap } => cmd_diff(&model, bound, cap, out),
        Command::Enumerate { space, count_only } => cmd_enumerate(&space, count_only, out),
        Command::Mutate {
            model,
            bound,
            samples,
            run,
        } => cmd_mutate(&model, bound, samples, &run, out),
        Command::Bench {
            model,
            model_file,
            trace_file,
            instances,
            count,
            format,
            run,
        } => cmd_bench(
            bench_model(model, model_file)?,
            trace_file,
            instances,
            count,
            format,
            &run,
            out,
        ),
        Command::Concordance {
            space,
            models,
            bound,
            mismatches,
            format,
            run,
        } => cmd_concordance(&space, models, bound, mismatches, format, &run, out),
    }
}

fn parse_sig(text: &str) -> Result<Signature, Failure> {
    let (ls, ms) = text
        .split_once(':')
        .ok_or_else(|| usage("--sig expects `lifelines:messages`"))?;
    let split = |s: &str| s.split(',').map(|x| x.trim().to_string()).collect::<Vec<_>>();
    Ok(Signature::new(split(ls), split(ms))?)
}

struct Loaded {
    term: Interaction,
    sig: Option<Signature>,
}

fn load_model(m: &ModelArgs) -> Result<Loaded, Failure> {
    let text = match (&m.model, &m.model_file) {
        (Some(t), None) => t.clone(),
        (None, Some(p)) => fs::read_to_string(p)?,
        _ => return Err(usage("exactly one of --model and --model-file is required")),
    };
    let sig = m.sig.as_deref().map(parse_sig).transpose()?;
    let term = match &sig {
        Some(sig) => parse_interaction(&text, sig)?,
        None => parse_interaction_permissive(&text)?,
    };
    Ok(Loaded { term, sig })
}

fn resolve_seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| usage(format!("{SEED_VAR} must be an unsigned integer, got `{v}`"))),
        Err(_) => Ok(flag),
    }
}

fn configure_jobs(jobs: Option<usize>) -> Result<(), Failure> {
    if let Some(n) = jobs {
        if n == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        // A second configuration in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn trace_text(t: &Trace, format: Format) -> String {
    match (t.is_empty(), format) {
        (true, Format::Text) => EMPTY_TRACE_MARKER.to_string(),
        _ => t.to_string(),
    }
}

fn position_text(p: &Position) -> String {
    if p.is_epsilon() {
        "eps".to_string()
    } else {
        p.to_string()
    }
}

fn cmd_parse(m: &ModelArgs, out: &mut dyn Write) -> CliResult {
    let l = load_model(m)?;
    let i = &l.term;
    match m.format {
        Format::Text => writeln!(out, "{i}")?,
        Format::Tsv => writeln!(out, "{i}\t{}\t{}\t{}", i.depth(), i.size(), i.action_count())?,
        Format::Jsonl => writeln!(
            out,
            "{}",
            json!({"interaction": i.to_string(), "depth": i.depth(), "size": i.size(), "actions": i.action_count()})
        )?,
    }
    Ok(0)
}

fn cmd_semantics(m: &ModelArgs, method: Method, bound: usize, cap: usize, out: &mut dyn Write) -> CliResult {
    let l = load_model(m)?;
    let set = match method {
        Method::Unfold => sigma_u_capped(&l.term, bound, cap)?,
        Method::Operational => sigma_o_capped(&l.term, bound, cap)?,
    };
    for t in set.iter() {
        match m.format {
            Format::Jsonl => writeln!(out, "{}", json!({ "trace": t.to_string() }))?,
            f => writeln!(out, "{}", trace_text(t, f))?,
        }
    }
    Ok(0)
}

fn cmd_frontier(m: &ModelArgs, out: &mut dyn Write) -> CliResult {
    let l = load_model(m)?;
    let ss = steps(&l.term);
    match m.format {
        Format::Text => {
            let ps: Vec<String> = ss.iter().map(|s| position_text(&s.position)).collect();
            writeln!(out, "{}", ps.join(" "))?;
        }
        Format::Tsv => {
            for s in &ss {
                writeln!(out, "{}\t{}", s.position, s.action)?;
            }
        }
        Format::Jsonl => {
            for s in &ss {
                writeln!(
                    out,
                    "{}",
                    json!({"position": s.position.to_string(), "action": s.action.to_string()})
                )?;
            }
        }
    }
    Ok(0)
}

fn cmd_step(m: &ModelArgs, position: &str, out: &mut dyn Write) -> CliResult {
    let l = load_model(m)?;
    let p: Position = position
        .parse()
        .map_err(|_| usage(format!("`{position}` is not a position")))?;
    let action = l.term.subterm_at(&p)?.to_string();
    let next = execute(&l.term, &p)?;
    match m.format {
        Format::Text => writeln!(out, "{next}")?,
        Format::Tsv => writeln!(out, "{action}\t{next}")?,
        Format::Jsonl => writeln!(out, "{}", json!({"action": action, "next": next.to_string()}))?,
    }
    Ok(0)
}

fn cmd_prune(m: &ModelArgs, lifeline: &str, out: &mut dyn Write) -> CliResult {
    let l = load_model(m)?;
    let r = prune(&l.term, lifeline);
    match m.format {
        Format::Text if r.eliminated => writeln!(out, "{} (eliminated)", r.pruned)?,
        Format::Text => writeln!(out, "{}", r.pruned)?,
        Format::Tsv => writeln!(out, "{}\t{}", r.pruned, r.eliminated)?,
        Format::Jsonl => writeln!(
            out,
            "{}",
            json!({"pruned": r.pruned.to_string(), "eliminated": r.eliminated})
        )?,
    }
    Ok(0)
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Covered => 0,
        Verdict::TooShort => 1,
        Verdict::TooLong => 2,
        Verdict::Out => 3,
    }
}

fn load_traces(l: &Loaded, t: &TraceArgs) -> Result<Vec<Trace>, Failure> {
    match (&t.trace, &t.trace_file) {
        (Some(text), None) => {
            let trace = if text == EMPTY_TRACE_MARKER {
                Trace::empty()
            } else if let Some(sig) = &l.sig {
                parse_trace(text, sig)?
            } else {
                parse_trace_permissive(text)?
            };
            Ok(vec![trace])
        }
        (None, Some(p)) => Ok(parse_trace_lines(&fs::read_to_string(p)?, l.sig.as_ref())?),
        _ => Err(usage("exactly one of --trace and --trace-file is required")),
    }
}

fn cmd_analyze(m: &ModelArgs, t: &TraceArgs, witness: bool, out: &mut dyn Write) -> CliResult {
    let l = load_model(m)?;
    let traces = load_traces(&l, t)?;
    let mut worst: Option<Verdict> = None;
    for trace in &traces {
        let r = analyze(&l.term, trace);
        worst = Some(worst.map_or(r.verdict, |w| w.min(r.verdict)));
        let path: Vec<String> = r.witness.iter().flatten().map(|w| position_text(&w.position)).collect();
        match m.format {
            Format::Text if traces.len() == 1 && !witness => writeln!(out, "{}", r.verdict)?,
            Format::Text if traces.len() == 1 => writeln!(out, "{}\t{}", r.verdict, path.join(" "))?,
            Format::Text => writeln!(out, "{}\t{}", trace_text(trace, Format::Text), r.verdict)?,
            Format::Tsv => writeln!(out, "{}\t{}\t{}", trace, r.verdict, r.explored_nodes)?,
            Format::Jsonl => writeln!(
                out,
                "{}",
                json!({
                    "trace": trace.to_string(),
                    "verdict": r.verdict,
                    "explored_nodes": r.explored_nodes,
                    "witness": r.witness.as_ref().map(|_| path.clone()),
                })
            )?,
        }
    }
    Ok(worst.map_or(0, verdict_code))
}

fn cmd_diff(m: &ModelArgs, bound: usize, cap: usize, out: &mut dyn Write) -> CliResult {
    let l = load_model(m)?;
    let d = diff_semantics_capped(&l.term, bound, cap)?;
    match m.format {
        Format::Jsonl => writeln!(
            out,
            "{}",
            json!({
                "interaction": d.interaction.to_string(),
                "bound": d.bound,
                "equal": d.equal,
                "only_u": d.only_u.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
                "only_o": d.only_o.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            })
        )?,
        f => {
            writeln!(out, "{}", if d.equal { "equal" } else { "different" })?;
            for t in d.only_u.iter() {
                writeln!(out, "unfold-only\t{}", trace_text(t, f))?;
            }
            for t in d.only_o.iter() {
                writeln!(out, "operational-only\t{}", trace_text(t, f))?;
            }
        }
    }
    Ok(if d.equal { 0 } else { 1 })
}

fn cmd_enumerate(s: &SpaceArgs, count_only: bool, out: &mut dyn Write) -> CliResult {
    let spec = EnumSpec::new(s.lifelines, s.messages, s.depth)?;
    if count_only {
        let counts: Vec<String> = count_by_depth(&spec)?.iter().map(|c| c.to_string()).collect();
        writeln!(out, "{}", counts.join(" "))?;
    } else {
        for i in enumerate(&spec) {
            writeln!(out, "{i}")?;
        }
    }
    Ok(0)
}

fn alphabet_for(l: &Loaded) -> Result<Vec<interkernel::Action>, Failure> {
    let sig = match &l.sig {
        Some(sig) => sig.clone(),
        None => Signature::infer([&l.term]).map_err(|_| usage("the model has no actions; pass --sig"))?,
    };
    Ok(sig.actions())
}

fn cmd_mutate(m: &ModelArgs, bound: usize, samples: usize, run: &RunArgs, out: &mut dyn Write) -> CliResult {
    configure_jobs(run.jobs)?;
    let seed = resolve_seed(run.seed)?;
    let l = load_model(m)?;
    let plan = MutantPlan {
        bound,
        samples,
        ..MutantPlan::default()
    };
    let batches = generate_mutants(&l.term, &plan, &alphabet_for(&l)?, seed)?;
    if m.format == Format::Tsv {
        writeln!(out, "category\torigin\tmutant\texpected")?;
    }
    for b in &batches {
        for (t, v) in b.mutants.iter().zip(&b.expected) {
            match m.format {
                Format::Jsonl => writeln!(
                    out,
                    "{}",
                    json!({"category": b.category, "origin": b.origin.to_string(), "mutant": t.to_string(), "expected": v})
                )?,
                f => writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    b.category,
                    trace_text(&b.origin, f),
                    trace_text(t, f),
                    v
                )?,
            }
        }
    }
    Ok(0)
}

fn bench_model(model: Option<String>, model_file: Option<PathBuf>) -> Result<Interaction, Failure> {
    if model.is_none() && model_file.is_none() {
        return Ok(mqtt_model());
    }
    let args = ModelArgs {
        model,
        model_file,
        sig: None,
        format: Format::Text,
    };
    Ok(load_model(&args)?.term)
}

fn cmd_bench(
    term: Interaction,
    trace_file: Option<PathBuf>,
    instances: usize,
    count: usize,
    format: Format,
    run: &RunArgs,
    out: &mut dyn Write,
) -> CliResult {
    configure_jobs(run.jobs)?;
    let seed = resolve_seed(run.seed)?;
    let traces = match trace_file {
        Some(p) => parse_trace_lines(&fs::read_to_string(p)?, None)?,
        None => generate_concurrent_traces(&term, instances, count, seed)?,
    };
    let records = bench_trace_analysis(&term, &traces);
    match format {
        Format::Jsonl => {
            for r in &records {
                writeln!(out, "{}", serde_json::to_string(r).expect("plain data"))?;
            }
        }
        _ => write!(out, "{}", bench_tsv(&records))?,
    }
    Ok(0)
}

fn cmd_concordance(
    s: &SpaceArgs,
    models: usize,
    bound: usize,
    mismatches: Option<PathBuf>,
    format: Format,
    run: &RunArgs,
    out: &mut dyn Write,
) -> CliResult {
    configure_jobs(run.jobs)?;
    let seed = resolve_seed(run.seed)?;
    let spec = EnumSpec::new(s.lifelines, s.messages, s.depth)?;
    let sample = sample_interactions(&spec, models, &mut ChaCha8Rng::seed_from_u64(seed))?;
    let config = ConcordanceConfig {
        plan: MutantPlan {
            bound,
            ..MutantPlan::default()
        },
        alphabet: spec.alphabet(),
        seed,
    };
    let report = concordance(&sample, &config)?;
    match format {
        Format::Jsonl => write!(out, "{}", report.mismatches_jsonl())?,
        _ => {
            write!(out, "{}", report.to_tsv())?;
        }
    }
    if let Some(p) = mismatches {
        fs::write(p, report.mismatches_jsonl())?;
    }
    Ok(if report.mismatches.is_empty() { 0 } else { 1 })
}
