//! The `ebfdr` command line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value as Json};

use crate::model::{build_refinement_link, CompiledMachine, Machine};
use crate::oracle::{self, PropOutcome, RandomMachineSpec};
use crate::refine::{
    check_failure_divergence, check_trace_refinement, is_event_deterministic, verdict_json, Detail, Determinism,
    LabelMap, Pair, Verdict,
};
use crate::space::{
    explore, export_dot, load_space, save_space, skip_cycle_through, StateSpace, Trace, DEFAULT_MAX_STATES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "ebfdr", version, about = "Refinement checking for guarded-event machines")]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
    /// Give up when a state space grows beyond this many states.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_STATES, value_parser = positive)]
    pub max_states: usize,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,
    /// Write the explored state space as Graphviz DOT (explore).
    #[arg(long, global = true)]
    pub dot: Option<PathBuf>,
    /// Depth for bounded property checks.
    #[arg(long, global = true, default_value_t = 8, value_parser = positive)]
    pub prop_depth: usize,
    /// Write the explored state space as JSON (explore).
    #[arg(long, global = true)]
    pub save_space: Option<PathBuf>,
    /// Use a saved abstract state space instead of exploring (check-trace, check-fd).
    #[arg(long, global = true)]
    pub load_space: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Explore a machine and count states and transitions.
    Explore { file: PathBuf },
    /// Explore a machine and look for a state violating its invariant.
    ModelCheck { file: PathBuf },
    /// Check trace refinement of ABSTRACT by CONCRETE.
    CheckTrace { abstract_file: PathBuf, concrete_file: PathBuf },
    /// Check failure-divergence refinement of ABSTRACT by CONCRETE.
    CheckFd { abstract_file: PathBuf, concrete_file: PathBuf },
    /// Look for cycles of new events in a refining machine.
    CheckDivergence { file: PathBuf },
    /// Check that every label leads to at most one state.
    CheckDeterminism { file: PathBuf },
    /// Rerun one seed of the differential suite.
    #[command(hide = true)]
    OracleSeed { seed: u64 },
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

/// What a run prints and how it exits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

/// Exit status 0 when the checked property holds, 1 when it does not, 2 for
/// usage, input and bound errors.
pub fn run(config: &RunConfig) -> Outcome {
    let start = Instant::now();
    match dispatch(config) {
        Ok((code, Report(mut text, mut j))) => {
            let elapsed = start.elapsed().as_millis() as u64;
            let stdout = match config.output {
                OutputFormat::Text => {
                    writeln!(text, "elapsed: {elapsed} ms").unwrap();
                    text
                }
                OutputFormat::Json => {
                    j["elapsed_ms"] = json!(elapsed);
                    format!("{}\n", serde_json::to_string_pretty(&j).unwrap())
                }
            };
            Outcome {
                code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(Failure(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
    }
}

/// Text and JSON renderings of one result.
struct Report(String, Json);

fn load(path: &Path) -> Result<Machine, Failure> {
    Ok(crate::load(path)?)
}

fn compile(m: &Machine) -> Result<CompiledMachine, Failure> {
    Ok(CompiledMachine::new(m)?)
}

fn dispatch(config: &RunConfig) -> Result<(i32, Report), Failure> {
    match &config.command {
        Command::Explore { file } => {
            let m = load(file)?;
            let ss = explore(&compile(&m)?, config.max_states)?;
            if let Some(path) = &config.dot {
                std::fs::write(path, export_dot(&ss)).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            if let Some(path) = &config.save_space {
                std::fs::write(path, save_space(&ss)).map_err(|e| format!("{}: {e}", path.display()))?;
            }
            let text = format!(
                "machine {}: {} states, {} transitions\n",
                ss.machine_name(),
                ss.state_count(),
                ss.transition_count()
            );
            let j = json!({
                "machine": ss.machine_name(),
                "states": ss.state_count(),
                "transitions": ss.transition_count(),
            });
            Ok((0, Report(text, j)))
        }
        Command::ModelCheck { file } => model_check(config, file),
        Command::CheckTrace {
            abstract_file,
            concrete_file,
        } => check(config, abstract_file, concrete_file, false),
        Command::CheckFd {
            abstract_file,
            concrete_file,
        } => check(config, abstract_file, concrete_file, true),
        Command::CheckDivergence { file } => {
            let m = load(file)?;
            let cm = compile(&m)?;
            let ss = explore(&cm, config.max_states)?;
            let skip = ss.labels_of_events(&cm.new_event_names());
            let div = ss.divergent_states(&skip);
            let mut text = format!("{} divergent states\n", div.len());
            let mut j = json!({ "machine": ss.machine_name(), "divergent_states": div.len() });
            if let Some(&s) = div.iter().next() {
                let cycle = skip_cycle_through(&ss, s, &skip).expect("divergent state has a cycle");
                let labels: Vec<String> = cycle.iter().map(|(l, _)| l.to_string()).collect();
                let path = ss.path_to(s).expect("reachable");
                writeln!(text, "reached by {path}, state {}", ss.render_state(s)).unwrap();
                writeln!(text, "cycle: <{}>", labels.join(", ")).unwrap();
                j["state"] = json!(ss.render_state(s));
                j["cycle"] = json!(labels);
            }
            Ok((i32::from(!div.is_empty()), Report(text, j)))
        }
        Command::CheckDeterminism { file } => {
            let m = load(file)?;
            let ss = explore(&compile(&m)?, config.max_states)?;
            Ok(match is_event_deterministic(&ss) {
                Determinism::Deterministic => (
                    0,
                    Report(
                        format!("machine {} is event deterministic\n", ss.machine_name()),
                        json!({ "machine": ss.machine_name(), "deterministic": true }),
                    ),
                ),
                Determinism::Nondeterministic { state, label, successors } => {
                    let (a, b) = (ss.render_state(successors.0), ss.render_state(successors.1));
                    let text = format!(
                        "machine {} is not event deterministic: {label} leads from {} to both {a} and {b}\n",
                        ss.machine_name(),
                        ss.render_state(state),
                    );
                    let j = json!({
                        "machine": ss.machine_name(),
                        "deterministic": false,
                        "state": ss.render_state(state),
                        "label": label.to_string(),
                        "successors": [a, b],
                    });
                    (1, Report(text, j))
                }
            })
        }
        Command::OracleSeed { seed } => oracle_seed(config, *seed),
    }
}

fn model_check(config: &RunConfig, file: &Path) -> Result<(i32, Report), Failure> {
    let m = load(file)?;
    let cm = compile(&m)?;
    let ss = explore(&cm, config.max_states)?;
    let mut text = format!(
        "machine {}: {} states, {} transitions\n",
        ss.machine_name(),
        ss.state_count(),
        ss.transition_count()
    );
    let mut j = json!({
        "machine": ss.machine_name(),
        "states": ss.state_count(),
        "transitions": ss.transition_count(),
    });
    let Some(inv) = &cm.invariant else {
        text.push_str("no invariant\n");
        j["invariant"] = Json::Null;
        return Ok((0, Report(text, j)));
    };
    // States are numbered in BFS order, so the first violation is a closest one.
    let bad = ss.state_ids().find(|&s| !inv.eval_bool(&ss.state(s).0, &[]));
    match bad {
        None => {
            text.push_str("invariant holds\n");
            j["invariant"] = json!("holds");
            Ok((0, Report(text, j)))
        }
        Some(s) => {
            let path = ss.path_to(s).expect("reachable");
            writeln!(text, "invariant violated in {} after {path}", ss.render_state(s)).unwrap();
            j["invariant"] = json!("violated");
            j["state"] = json!(ss.render_state(s));
            j["trace"] = json!(path.labels().iter().map(|l| l.to_string()).collect::<Vec<_>>());
            Ok((1, Report(text, j)))
        }
    }
}

fn check(config: &RunConfig, abs_path: &Path, conc_path: &Path, fd: bool) -> Result<(i32, Report), Failure> {
    let (a, c) = (load(abs_path)?, load(conc_path)?);
    let link = build_refinement_link(&a, &c)?;
    let abs = match &config.load_space {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let ss = load_space(&text)?;
            if ss.machine_name() != a.name || ss.variables() != link.abstract_machine.variables {
                return Err(Failure(format!(
                    "{} holds a state space of `{}`, not of `{}`",
                    path.display(),
                    ss.machine_name(),
                    a.name
                )));
            }
            ss
        }
        None => explore(&link.abstract_machine, config.max_states)?,
    };
    let conc = explore(&link.concrete, config.max_states)?;
    let map = LabelMap::new(link, &abs, &conc);

    let mut warnings = Vec::new();
    let verdict = if fd {
        if let Determinism::Nondeterministic { state, label, .. } = is_event_deterministic(&abs) {
            warnings.push(format!(
                "abstract machine {} is not event deterministic ({label} at {}); failures may be missed",
                abs.machine_name(),
                abs.render_state(state)
            ));
        }
        check_failure_divergence(&abs, &conc, &map)
    } else {
        check_trace_refinement(&abs, &conc, &map)
    };

    let mut j = verdict_json(&verdict, &abs, &conc);
    if !warnings.is_empty() {
        j["warnings"] = json!(warnings);
    }
    let mut text = String::new();
    for w in &warnings {
        writeln!(text, "warning: {w}").unwrap();
    }
    text.push_str(&verdict_text(&verdict, &abs, &conc));
    Ok((i32::from(!verdict.refines()), Report(text, j)))
}

fn trace_text(ss: &StateSpace, t: &Trace) -> String {
    let mut out = format!("    {}\n", ss.render_state(t.origin));
    for (l, s) in &t.steps {
        writeln!(out, "  {l}\n    {}", ss.render_state(*s)).unwrap();
    }
    out
}

/// Human-readable verdict with both traces state by state.
pub fn verdict_text(v: &Verdict, abs: &StateSpace, conc: &StateSpace) -> String {
    let Some(cex) = v.counterexample() else {
        return "result: refines\n".into();
    };
    let mut out = format!("result: fails ({})\n", cex.reason);
    writeln!(out, "concrete trace {}:", cex.concrete_trace).unwrap();
    out.push_str(&trace_text(conc, &cex.concrete_trace));
    writeln!(out, "abstract trace {}:", cex.abstract_trace).unwrap();
    out.push_str(&trace_text(abs, &cex.abstract_trace));
    let set = |s: &std::collections::BTreeSet<crate::space::EventLabel>| {
        let items: Vec<String> = s.iter().map(|l| l.to_string()).collect();
        format!("{{{}}}", items.join(", "))
    };
    match &cex.detail {
        Detail::FailureMismatch {
            concrete_enabled,
            abstract_enabled,
            abstract_refusal,
            abs_refusal,
        } => {
            writeln!(out, "concrete enables {}, abstract enables {}", set(concrete_enabled), set(abstract_enabled)).unwrap();
            writeln!(out, "abstract refusal {} differs from AbsRefusal {}", set(abstract_refusal), set(abs_refusal)).unwrap();
        }
        Detail::Divergence { cycle } => {
            let labels: Vec<String> = cycle.iter().map(|l| l.to_string()).collect();
            writeln!(out, "skip cycle <{}> from the last concrete state", labels.join(", ")).unwrap();
        }
        Detail::TraceMismatch { unmatched, image } => {
            writeln!(out, "{unmatched} (as {image}) has no abstract counterpart").unwrap();
        }
    }
    out
}

fn oracle_seed(config: &RunConfig, seed: u64) -> Result<(i32, Report), Failure> {
    let spec = RandomMachineSpec::from_seed(seed);
    let (a_src, c_src) = oracle::generate_sources(&spec);
    let (a, c) = oracle::generate_machine_pair(&spec);
    let pair = Pair::build(&a, &c, config.max_states)?;
    let k = oracle::pair_depth_bound(&pair.abs, &pair.conc);
    let deterministic = is_event_deterministic(&pair.abs).holds();
    let fd = pair.check_fd().refines();
    let tr = pair.check_trace().refines();
    let oracle_fd = oracle::oracle_failure_refines(&pair.abs, &pair.conc, &pair.map, k).is_ok()
        && oracle::oracle_divergence_free(&pair.conc, &pair.skip_labels()).is_ok();
    let oracle_tr = oracle::oracle_trace_refines(&pair.abs, &pair.conc, &pair.map, k).is_ok();
    let outcome = |o: PropOutcome<Vec<crate::space::EventLabel>>| match o {
        PropOutcome::Holds => "holds".to_string(),
        PropOutcome::Skipped(why) => format!("skipped ({why})"),
        PropOutcome::Violated(t) => {
            let labels: Vec<String> = t.iter().map(|l| l.to_string()).collect();
            format!("violated at <{}>", labels.join(", "))
        }
    };
    let prop1 = outcome(oracle::check_prop1(&pair.abs, &pair.conc, &pair.map));
    let prop2 = outcome(oracle::check_prop2(&pair.abs, &pair.conc, &pair.map, config.prop_depth));
    let agree = tr == oracle_tr && (!deterministic || fd == oracle_fd);

    let mut text = format!("{spec:?}\n\n{a_src}\n{c_src}\n");
    writeln!(text, "states: abstract {}, concrete {}", pair.abs.state_count(), pair.conc.state_count()).unwrap();
    writeln!(text, "abstract event deterministic: {deterministic}").unwrap();
    writeln!(text, "check-trace: {tr}, oracle: {oracle_tr}").unwrap();
    writeln!(text, "check-fd: {fd}, oracle: {oracle_fd}").unwrap();
    writeln!(text, "prop1: {prop1}").unwrap();
    writeln!(text, "prop2 (k = {}): {prop2}", config.prop_depth).unwrap();
    writeln!(text, "{}", if agree { "agree" } else { "DISAGREE" }).unwrap();
    let j = json!({
        "seed": seed,
        "abstract": a_src,
        "concrete": c_src,
        "deterministic": deterministic,
        "check_trace": tr,
        "oracle_trace": oracle_tr,
        "check_fd": fd,
        "oracle_fd": oracle_fd,
        "prop1": prop1,
        "prop2": prop2,
        "agree": agree,
    });
    Ok((i32::from(!agree), Report(text, j)))
}
