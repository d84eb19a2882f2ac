//! `slim`: run goals against a program, check candidate solutions, and
//! decide existential-free goals.
//!
//! Exit codes: 0 solution / verified / provable, 2 suspended only /
//! unverifiable, 3 exhausted or failed / refuted / not provable, 1 input
//! error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use slim::engine::{
    check_solution, decide_existential_free, search, OutcomeKind, SearchConfig, SearchReport, TraceStep, Verdict,
};
use slim::syntax::{goal_to_string, parse_file, parse_goal, parse_substitution, state_to_string, subst_to_string, SourceFile};
use slim::{Goal, Substitution};

#[derive(Parser)]
#[command(name = "slim", version, about = "Proof search with equality as a logical connective")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Search for solutions of a goal.
    Solve(SolveArgs),
    /// Check a substitution for the existentials of a goal.
    Check(CheckArgs),
    /// Decide a goal without existentials or atoms.
    Decide(GoalArgs),
}

#[derive(Args)]
struct GoalArgs {
    /// Program file (`.slim`).
    program: PathBuf,
    /// Goal text, or the name of a goal declared in the program file.
    #[arg(long, conflicts_with = "goal_file")]
    goal: Option<String>,
    /// File holding one goal.
    #[arg(long)]
    goal_file: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct Bounds {
    #[arg(long, default_value_t = 500)]
    max_transitions: usize,
    #[arg(long, default_value_t = 500)]
    max_backchain: usize,
    #[arg(long, default_value_t = 1)]
    max_solutions: usize,
    #[arg(long, default_value_t = 16)]
    max_imitation: usize,
    #[arg(long, default_value_t = 200_000)]
    max_nodes: usize,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    occurs_check: Switch,
}

impl Bounds {
    fn config(&self, trace: bool) -> SearchConfig {
        SearchConfig {
            max_transitions: self.max_transitions,
            max_backchain_depth: self.max_backchain,
            max_imitation_per_var: self.max_imitation,
            occurs_check_pruning: self.occurs_check == Switch::On,
            max_solutions: self.max_solutions,
            max_nodes: self.max_nodes,
            trace,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    goal: GoalArgs,
    #[command(flatten)]
    bounds: Bounds,
    /// Print the transitions leading to each outcome.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    goal: GoalArgs,
    #[command(flatten)]
    bounds: Bounds,
    /// Substitution, e.g. `x := u; h := w\ f w`.
    #[arg(long)]
    subst: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Records,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

fn load(args: &GoalArgs) -> Result<(SourceFile, Goal)> {
    let text = std::fs::read_to_string(&args.program)
        .with_context(|| format!("cannot read {}", args.program.display()))?;
    let file = parse_file(&text).with_context(|| format!("in {}", args.program.display()))?;
    let goal = match (&args.goal, &args.goal_file) {
        (Some(g), _) => match file.goal(g.trim()) {
            Some(named) => named.clone(),
            None => parse_goal(g, &file.program.sig).context("in --goal")?,
        },
        (None, Some(path)) => read_goal(path, &file)?,
        (None, None) => bail!("one of --goal or --goal-file is required"),
    };
    Ok((file, goal))
}

fn read_goal(path: &Path, file: &SourceFile) -> Result<Goal> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    parse_goal(&text, &file.program.sig).with_context(|| format!("in {}", path.display()))
}

fn bindings(theta: &Substitution) -> Value {
    let map: serde_json::Map<String, Value> = theta
        .iter()
        .map(|(x, b)| (x.to_string(), Value::String(b.term.to_string())))
        .collect();
    Value::Object(map)
}

fn trace_json(trace: &[TraceStep]) -> Value {
    trace
        .iter()
        .map(|t| {
            json!({
                "kind": t.kind.to_string(),
                "conjunct": t.conjunct,
                "label": subst_to_string(&t.label),
                "state": format!("{:016x}", t.hash),
            })
        })
        .collect()
}

fn print_trace(trace: &[TraceStep]) {
    for t in trace {
        println!(
            "  step {} conjunct {} [{}] -> {:016x}",
            t.kind,
            t.conjunct,
            subst_to_string(&t.label),
            t.hash
        );
    }
}

fn classification(report: &SearchReport) -> (&'static str, u8) {
    if report.solutions().next().is_some() {
        ("solution", 0)
    } else if report.suspended().next().is_some() {
        ("suspended", 2)
    } else if report.exhausted() {
        ("exhausted", 3)
    } else {
        ("failure", 3)
    }
}

fn solve(args: &SolveArgs) -> Result<u8> {
    let (file, goal) = load(&args.goal)?;
    let cfg = args.bounds.config(args.trace);
    let report = search(&file.program, &goal, &cfg)?;
    let (result, code) = classification(&report);
    let s = &report.stats;
    match args.goal.format {
        Format::Text => {
            println!("goal: {}", goal_to_string(&goal));
            println!("state: {}", state_to_string(&report.initial));
            let mut n = 0;
            for o in &report.outcomes {
                match &o.kind {
                    OutcomeKind::Solution { theta, .. } => {
                        n += 1;
                        println!("solution {n}: {}", subst_to_string(theta));
                    }
                    OutcomeKind::Suspended { state, theta, .. } => {
                        println!("suspended: {} with [{}]", state_to_string(state), subst_to_string(theta));
                    }
                    OutcomeKind::Exhausted(bounds) => {
                        let names: Vec<String> = bounds.iter().map(|b| b.to_string()).collect();
                        println!("exhausted: {}", names.join(", "));
                    }
                }
                if let Some(t) = &o.trace {
                    print_trace(t);
                }
            }
            println!(
                "stats: transitions {} nodes {} pruned {} rounds {} depth {}",
                s.transitions, s.nodes, s.pruned, s.rounds, s.depth
            );
            println!("result: {result}");
        }
        Format::Records => {
            for o in &report.outcomes {
                let mut rec = match &o.kind {
                    OutcomeKind::Solution { theta, .. } => json!({"kind": "solution", "bindings": bindings(theta)}),
                    OutcomeKind::Suspended { state, theta, .. } => json!({
                        "kind": "suspended",
                        "bindings": bindings(theta),
                        "state": state_to_string(state),
                    }),
                    OutcomeKind::Exhausted(bounds) => json!({
                        "kind": "exhausted",
                        "bounds": bounds.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
                    }),
                };
                if let Some(t) = &o.trace {
                    rec["trace"] = trace_json(t);
                }
                println!("{rec}");
            }
            println!(
                "{}",
                json!({
                    "kind": "stats",
                    "result": result,
                    "transitions": s.transitions,
                    "nodes": s.nodes,
                    "pruned": s.pruned,
                    "rounds": s.rounds,
                    "depth": s.depth,
                })
            );
        }
    }
    Ok(code)
}

fn check(args: &CheckArgs) -> Result<u8> {
    let (file, goal) = load(&args.goal)?;
    let theta = parse_substitution(&args.subst, &file.program.sig, &goal).context("in --subst")?;
    let verdict = check_solution(&file.program, &goal, &theta, &args.bounds.config(false))?;
    match args.goal.format {
        Format::Text => println!("{verdict}"),
        Format::Records => println!("{}", json!({"kind": "verdict", "verdict": verdict.to_string(), "bindings": bindings(&theta)})),
    }
    Ok(match verdict {
        Verdict::Verified => 0,
        Verdict::Unverifiable => 2,
        Verdict::Refuted => 3,
    })
}

fn decide(args: &GoalArgs) -> Result<u8> {
    let (_, goal) = load(args)?;
    let provable = decide_existential_free(&goal)?;
    let word = if provable { "provable" } else { "not-provable" };
    match args.format {
        Format::Text => println!("{word}"),
        Format::Records => println!("{}", json!({"kind": "decision", "result": word})),
    }
    Ok(if provable { 0 } else { 3 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(a) => solve(a),
        Command::Check(a) => check(a),
        Command::Decide(a) => decide(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
