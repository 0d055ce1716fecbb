//! Command-line driver: transformation, rule checking, reachability, soundness and CFA
//! output over `.bb` programs.

pub mod json;

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use bitbranch_core::lang::{
    parse_expr, parse_program, pretty_print_with, ParseError, PrintOptions, Program,
};
use bitbranch_core::rules::{check_rule_correctness, Catalog, Mutation, RuleKind};
use bitbranch_core::semantics::{reachable, MachineConfig};
use bitbranch_core::soundness::gen::{fuzz_corpus, GenConfig};
use bitbranch_core::soundness::{
    certify_safety_with, check_inclusion_with, replay_witness, InclusionStatus, InclusionVerdict,
    RunStats, SafetyOutcome, SafetyReport, Witness,
};
use bitbranch_core::transform::{
    branch_normalize, build_cfa, t_e_with, transform_program_with, TransformOptions,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse { path: String, source: ParseError },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: json::JsonError,
    },
    #[error("{path}: {msg}")]
    Scope { path: String, msg: String },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "bitbranch",
    version,
    about = "Bitwise-branching transformer and checkers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the transformed program.
    Transform(TransformArgs),
    /// Check every rule exhaustively; one TSV line per rule and width.
    CheckRules(CheckRulesArgs),
    /// Explore a program and report reachability as JSON.
    Reach(ReachArgs),
    /// Compare observations of programs and their transformations.
    Soundness(SoundnessArgs),
    /// Print the control-flow automaton as DOT.
    Cfa(CfaArgs),
}

#[derive(Debug, Args)]
struct RuleSelection {
    /// Comma-separated rule ids to enable (default: all).
    #[arg(long, value_delimiter = ',')]
    rules: Option<Vec<String>>,
    /// Fold at most N rules into each site.
    #[arg(long, value_name = "N")]
    max_nesting: Option<usize>,
    /// Break one catalog rule on purpose.
    #[arg(long, value_parser = parse_mutation)]
    mutation: Option<Mutation>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Emit {
    Text,
    Json,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[command(flatten)]
    select: RuleSelection,
    #[arg(long, value_enum, default_value = "text")]
    emit: Emit,
    /// Also write the CFA of the normalized result to FILE.
    #[arg(long, value_name = "FILE")]
    cfa_dot: Option<PathBuf>,
    /// Print origin tags as comments.
    #[arg(long)]
    annotate: bool,
    /// Transform a single expression instead of a program.
    #[arg(long, value_name = "EXPR", conflicts_with = "input")]
    expr: Option<String>,
    /// Program file (text or AST JSON), `-` for stdin.
    #[arg(required_unless_present = "expr")]
    input: Option<String>,
}

#[derive(Debug, Args)]
struct CheckRulesArgs {
    /// Width to check at; repeatable. Default: 4 and 6 for all rules, 8 for rewrite rules.
    #[arg(long)]
    width: Vec<u32>,
    #[arg(long, value_parser = parse_mutation)]
    mutation: Option<Mutation>,
    /// Only these rule ids.
    #[arg(long, value_delimiter = ',')]
    rules: Option<Vec<String>>,
}

#[derive(Debug, Args)]
struct ReachArgs {
    #[arg(long, default_value_t = 8)]
    width: u32,
    #[arg(long, default_value_t = 1_000_000)]
    bound: usize,
    /// Explore the transformed program instead.
    #[arg(long)]
    transform: bool,
    #[command(flatten)]
    select: RuleSelection,
    input: String,
}

#[derive(Debug, Args)]
struct SoundnessArgs {
    #[arg(long, default_value_t = 4)]
    width: u32,
    #[arg(long, default_value_t = 10_000)]
    bound: usize,
    /// Seed of the random corpus, used when no file is given.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of random programs, used when no file is given.
    #[arg(long, default_value_t = 500)]
    count: usize,
    /// Report safety of the file through its transformation instead of inclusion.
    #[arg(long, requires = "input")]
    certify: bool,
    #[command(flatten)]
    select: RuleSelection,
    input: Option<String>,
}

#[derive(Debug, Args)]
struct CfaArgs {
    /// Transform before building the automaton.
    #[arg(long)]
    transform: bool,
    #[command(flatten)]
    select: RuleSelection,
    input: String,
}

fn parse_mutation(s: &str) -> Result<Mutation, String> {
    Mutation::from_name(s).ok_or_else(|| {
        let names: Vec<_> = Mutation::ALL.iter().map(|m| m.name()).collect();
        format!(
            "unknown mutation `{s}`; expected one of {}",
            names.join(", ")
        )
    })
}

impl RuleSelection {
    fn catalog(&self) -> Catalog {
        self.mutation
            .map_or_else(Catalog::standard, Catalog::mutated)
    }

    fn options(&self) -> Result<TransformOptions, CliError> {
        let mut opts = TransformOptions::new();
        if let Some(ids) = &self.rules {
            opts = opts
                .with_rules(ids.iter().map(String::as_str))
                .map_err(|e| CliError::Usage(e.to_string()))?;
        }
        if let Some(n) = self.max_nesting {
            opts = opts.with_max_nesting(n);
        }
        Ok(opts)
    }
}

fn machine(width: u32) -> Result<MachineConfig, CliError> {
    MachineConfig::new(width).map_err(|e| CliError::Usage(e.to_string()))
}

fn read_source(input: &str) -> Result<String, CliError> {
    let io = |source| CliError::Io {
        path: input.to_string(),
        source,
    };
    if input == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(io)?;
        Ok(s)
    } else {
        std::fs::read_to_string(Path::new(input)).map_err(io)
    }
}

/// Reads a program from a file or stdin; a leading `{` selects the JSON form.
pub fn load_program(input: &str) -> Result<Program, CliError> {
    let src = read_source(input)?;
    let path = if input == "-" {
        "<stdin>".to_string()
    } else {
        input.to_string()
    };
    if src.trim_start().starts_with('{') {
        let v: Value = serde_json::from_str(&src).map_err(|e| CliError::Json {
            path: path.clone(),
            source: json::JsonError {
                path: "$".into(),
                msg: e.to_string(),
            },
        })?;
        let p = json::program_from_json(&v).map_err(|source| CliError::Json {
            path: path.clone(),
            source,
        })?;
        p.check_scoping().map_err(|e| CliError::Scope {
            path,
            msg: e.to_string(),
        })?;
        Ok(p)
    } else {
        parse_program(&src).map_err(|source| CliError::Parse { path, source })
    }
}

fn io_err(path: &str) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_string(),
        source,
    }
}

fn stats_json(s: &RunStats) -> Value {
    json!({
        "observed_count": s.observed,
        "error_reached": s.error_reached,
        "exhausted": s.exhausted,
        "fault_count": s.faults,
        "steps": s.steps,
    })
}

fn status_name(s: InclusionStatus) -> &'static str {
    match s {
        InclusionStatus::Holds => "holds",
        InclusionStatus::Fails => "fails",
        InclusionStatus::Inconclusive => "inconclusive",
    }
}

fn witness_json(v: &InclusionVerdict) -> Value {
    match &v.witness {
        None => Value::Null,
        Some(Witness::ErrorReached) => json!({"kind": "error_reached"}),
        Some(Witness::Observation(o)) => {
            let state: serde_json::Map<String, Value> = v
                .vars
                .iter()
                .zip(&o.values)
                .map(|(k, x)| (k.to_string(), json!(x)))
                .collect();
            json!({"kind": "observation", "origin": o.origin, "state": state})
        }
    }
}

fn verdict_json(v: &InclusionVerdict) -> Value {
    json!({
        "status": status_name(v.status),
        "holds": v.holds(),
        "witness": witness_json(v),
        "source": stats_json(&v.source),
        "transformed": stats_json(&v.transformed),
    })
}

fn safety_json(r: &SafetyReport) -> Value {
    let outcome = match r.outcome {
        SafetyOutcome::Safe => "safe",
        SafetyOutcome::TrueAlarm => "true_alarm",
        SafetyOutcome::SpuriousAlarm => "spurious_alarm",
        SafetyOutcome::Inconclusive => "inconclusive",
    };
    json!({
        "outcome": outcome,
        "width": r.width,
        "message": r.to_string(),
        "transformed": stats_json(&r.transformed),
        "source": r.source.as_ref().map(stats_json),
    })
}

fn write_json(out: &mut dyn Write, v: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).expect("values built here always serialize");
    writeln!(out, "{text}").map_err(io_err("<stdout>"))
}

fn transform_cmd(a: &TransformArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let catalog = a.select.catalog();
    let opts = a.select.options()?;
    let stdout = io_err("<stdout>");
    if let Some(src) = &a.expr {
        let e = parse_expr(src).map_err(|source| CliError::Parse {
            path: "<expr>".into(),
            source,
        })?;
        let t = t_e_with(&e, &opts, &catalog);
        match a.emit {
            Emit::Text => writeln!(out, "{t}").map_err(stdout)?,
            Emit::Json => write_json(out, &json::expr_to_json(&t))?,
        }
        return Ok(EXIT_OK);
    }
    let input = a.input.as_deref().expect("clap enforces an input");
    let p = load_program(input)?;
    let t = transform_program_with(&p, &opts, &catalog);
    match a.emit {
        Emit::Text => {
            let text = pretty_print_with(
                &t,
                PrintOptions {
                    annotate: a.annotate,
                },
            );
            out.write_all(text.as_bytes()).map_err(stdout)?;
        }
        Emit::Json => write_json(out, &json::program_to_json(&t))?,
    }
    if let Some(path) = &a.cfa_dot {
        let cfa = build_cfa(&branch_normalize(&t)).expect("normalized programs always build");
        let shown = path.display().to_string();
        std::fs::write(path, cfa.to_dot()).map_err(io_err(&shown))?;
    }
    Ok(EXIT_OK)
}

fn check_rules_cmd(a: &CheckRulesArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let catalog = a.mutation.map_or_else(Catalog::standard, Catalog::mutated);
    if let Some(ids) = &a.rules {
        if let Some(bad) = ids.iter().find(|id| catalog.get(id).is_none()) {
            return Err(CliError::Usage(format!("unknown rule `{bad}`")));
        }
    }
    let widths: Vec<MachineConfig> = a
        .width
        .iter()
        .map(|&w| machine(w))
        .collect::<Result<_, _>>()?;
    let mut all_pass = true;
    for rule in catalog.rules() {
        if a.rules.as_ref().is_some_and(|ids| !ids.contains(&rule.id)) {
            continue;
        }
        let plan: Vec<MachineConfig> = if widths.is_empty() {
            let ws: &[u32] = if rule.kind == RuleKind::Rewrite {
                &[4, 6, 8]
            } else {
                &[4, 6]
            };
            ws.iter().map(|&w| machine(w)).collect::<Result<_, _>>()?
        } else {
            widths.clone()
        };
        for cfg in plan {
            let v = check_rule_correctness(rule, cfg);
            all_pass &= v.pass;
            let line = match &v.counterexample {
                None => format!("{}\t{}\tPASS", v.rule, v.width),
                Some(c) => format!("{}\t{}\tFAIL\t{c}", v.rule, v.width),
            };
            writeln!(out, "{line}").map_err(io_err("<stdout>"))?;
        }
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn reach_cmd(a: &ReachArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = machine(a.width)?;
    let mut p = load_program(&a.input)?;
    if a.transform {
        p = transform_program_with(&p, &a.select.options()?, &a.select.catalog());
    }
    let r = reachable(&p, cfg, a.bound);
    write_json(
        out,
        &json!({
            "width": a.width,
            "error_reached": r.error_reached,
            "exhausted": r.exhausted,
            "fault_count": r.fault_count(),
            "observed_count": r.observed_count(),
            "steps": r.steps,
        }),
    )?;
    Ok(EXIT_OK)
}

fn soundness_cmd(a: &SoundnessArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = machine(a.width)?;
    let catalog = a.select.catalog();
    let opts = a.select.options()?;
    if let Some(input) = &a.input {
        let p = load_program(input)?;
        if a.certify {
            let r = certify_safety_with(&p, &opts, &catalog, cfg, a.bound);
            write_json(out, &safety_json(&r))?;
            return Ok(EXIT_OK);
        }
        let v = check_inclusion_with(&p, &opts, &catalog, cfg, a.bound);
        let validated = v
            .witness
            .as_ref()
            .is_some_and(|w| replay_witness(&p, &opts, &catalog, cfg, w));
        let mut j = verdict_json(&v);
        j["witness_validated"] = json!(validated);
        write_json(out, &j)?;
        return Ok(if validated {
            EXIT_CHECK_FAILED
        } else {
            EXIT_OK
        });
    }

    let gen = GenConfig {
        width: a.width,
        ..GenConfig::default()
    };
    let (mut holds, mut inconclusive, mut counterexamples, mut monotonicity) =
        (0usize, 0usize, 0usize, 0usize);
    let mut first_failure = Value::Null;
    for (i, p) in fuzz_corpus(a.seed, a.count, &gen).iter().enumerate() {
        let v = check_inclusion_with(p, &opts, &catalog, cfg, a.bound);
        match v.status {
            InclusionStatus::Holds => holds += 1,
            InclusionStatus::Inconclusive => inconclusive += 1,
            InclusionStatus::Fails => {}
        }
        let Some(w) = &v.witness else { continue };
        if v.status != InclusionStatus::Fails || !replay_witness(p, &opts, &catalog, cfg, w) {
            continue;
        }
        match w {
            Witness::ErrorReached => monotonicity += 1,
            Witness::Observation(_) => counterexamples += 1,
        }
        if first_failure.is_null() {
            let mut j = verdict_json(&v);
            j["index"] = json!(i);
            j["program"] = json!(bitbranch_core::lang::pretty_print(p));
            first_failure = j;
        }
    }
    write_json(
        out,
        &json!({
            "width": a.width,
            "bound": a.bound,
            "seed": a.seed,
            "programs": a.count,
            "holds": holds,
            "inconclusive": inconclusive,
            "validated_counterexamples": counterexamples,
            "error_monotonicity_violations": monotonicity,
            "first_failure": first_failure,
        }),
    )?;
    Ok(if counterexamples + monotonicity == 0 {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn cfa_cmd(a: &CfaArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut p = load_program(&a.input)?;
    if a.transform {
        p = transform_program_with(&p, &a.select.options()?, &a.select.catalog());
    }
    let cfa = build_cfa(&branch_normalize(&p)).expect("normalized programs always build");
    out.write_all(cfa.to_dot().as_bytes())
        .map_err(io_err("<stdout>"))?;
    Ok(EXIT_OK)
}

/// Runs one invocation. `args` includes the program name. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Transform(a) => transform_cmd(a, out),
        Command::CheckRules(a) => check_rules_cmd(a, out),
        Command::Reach(a) => reach_cmd(a, out),
        Command::Soundness(a) => soundness_cmd(a, out),
        Command::Cfa(a) => cfa_cmd(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
