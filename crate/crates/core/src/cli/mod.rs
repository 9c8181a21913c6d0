//! Command-line front end. Every run produces a [`Report`] whose `payload`
//! is deterministic for a fixed configuration; wall-clock figures live in
//! `meta`.
//!
//! Exit codes: 0 complete, 1 internal error, 2 usage error, 3 invalid group
//! spec or incompatible checkpoint, 4 partial result (budget exhausted or
//! search infeasible), 5 a lemma check found a counterexample.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Parser, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::classify::{self, ClassifyError, Theorem};
use crate::group::{Group, GroupError};
use crate::invariants::checkpoint::Checkpoint;
use crate::invariants::{self, Budget, Census, GaoMode, InvariantError, SearchOptions, Status};
use crate::lemma_lab::{self, LabConfig, LabError};
use crate::products;
use crate::sequence::Sequence;

pub const CHECKPOINT_FILE: &str = "checkpoint.json";

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Davenport,
    Gao,
    CensusT11,
    CensusT12,
    VerifyT11,
    VerifyT12,
    Lemmas,
    Products,
}

impl Task {
    fn searches(self) -> bool {
        !matches!(self, Task::Lemmas | Task::Products)
    }

    fn is_census(self) -> bool {
        matches!(self, Task::CensusT11 | Task::CensusT12)
    }
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    /// One pretty-printed report.
    #[default]
    Json,
    /// Compact lines: one per lemma outcome or census member, then the report.
    Jsonl,
    /// Census members only, one row each.
    Csv,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum GaoModeArg {
    #[default]
    Auto,
    Exhaustive,
    LowerBoundOnly,
}

impl From<GaoModeArg> for GaoMode {
    fn from(m: GaoModeArg) -> Self {
        match m {
            GaoModeArg::Auto => GaoMode::Auto,
            GaoModeArg::Exhaustive => GaoMode::Exhaustive,
            GaoModeArg::LowerBoundOnly => GaoMode::LowerBoundOnly,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "zerosum", version, about = "Zero-sum invariants and extremal sequences over small finite groups")]
struct Args {
    /// Task to run; may be omitted with --resume.
    #[arg(value_enum)]
    task: Option<Task>,
    /// Group spec: metacyclic:p,m,r | cyclic:n | cayley:<path>.
    #[arg(long)]
    group: Option<String>,
    /// Wall-clock budget for searches.
    #[arg(long)]
    budget_seconds: Option<f64>,
    /// Node budget for searches; also lifts the feasibility limit.
    #[arg(long)]
    node_cap: Option<u64>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,
    /// Seed for randomized lemma checks.
    #[arg(long)]
    seed: Option<u64>,
    /// Random instances per lemma check when not exhaustive.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    gao_mode: GaoModeArg,
    /// Sequence text for the products task, e.g. `x.x*y.(y^2)^3`.
    #[arg(long)]
    sequence: Option<String>,
    /// Also report Π_n(S) for this n (products task).
    #[arg(long)]
    length: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory holding checkpoint.json for search tasks.
    #[arg(long)]
    checkpoint_dir: Option<PathBuf>,
    /// Continue from the checkpoint in --checkpoint-dir.
    #[arg(long)]
    resume: bool,
    #[arg(long, value_enum, default_value_t)]
    format: Format,
}

/// A validated configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub task: Task,
    pub group: String,
    pub budget_seconds: Option<f64>,
    pub node_cap: Option<u64>,
    pub workers: usize,
    pub seed: u64,
    pub trials: u64,
    pub gao_mode: GaoModeArg,
    pub sequence: Option<String>,
    pub length: Option<usize>,
    pub out: Option<PathBuf>,
    pub checkpoint_dir: Option<PathBuf>,
    pub resume: bool,
    pub format: Format,
}

impl RunConfig {
    pub fn checkpoint_path(&self) -> Option<PathBuf> {
        self.checkpoint_dir.as_ref().map(|d| d.join(CHECKPOINT_FILE))
    }

    /// What a checkpoint must agree on to be resumed.
    fn checkpoint_context(&self) -> Value {
        json!({ "task": self.task, "group": self.group })
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("invalid group spec: {0}")]
    InvalidSpec(String),
    #[error("incompatible checkpoint: {0}")]
    IncompatibleCheckpoint(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Usage(_) => 2,
            CliError::InvalidSpec(_) | CliError::IncompatibleCheckpoint(_) => 3,
        }
    }
}

impl From<GroupError> for CliError {
    fn from(e: GroupError) -> Self {
        match e {
            GroupError::InvalidSpec(s) => CliError::InvalidSpec(s),
            other => CliError::InvalidSpec(other.to_string()),
        }
    }
}

impl From<InvariantError> for CliError {
    fn from(e: InvariantError) -> Self {
        match e {
            InvariantError::IncompatibleCheckpoint(s) => CliError::IncompatibleCheckpoint(s),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Invariant(e) => e.into(),
            e @ (ClassifyError::NotMetacyclic | ClassifyError::TrivialKernel) => CliError::InvalidSpec(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        match e {
            LabError::Invariant(e) => e.into(),
            e @ (LabError::NotMetacyclic(_) | LabError::NonAbelianGroup(_)) => CliError::InvalidSpec(e.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Parses and validates a command line (`argv[0]` is the program name).
/// With `--resume`, the task and group default to the ones recorded in the
/// checkpoint and must agree with them when given.
pub fn parse_args<I, T>(argv: I) -> Result<RunConfig, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = Args::try_parse_from(argv).map_err(|e| CliError::Usage(e.to_string()))?;
    let (mut task, mut group) = (args.task, args.group.clone());
    if args.resume {
        let dir = args.checkpoint_dir.as_ref().ok_or_else(|| CliError::Usage("--resume needs --checkpoint-dir".into()))?;
        let path = dir.join(CHECKPOINT_FILE);
        if !path.exists() {
            return Err(CliError::Usage(format!("no checkpoint at {}", path.display())));
        }
        let cp = Checkpoint::load(&path)?;
        let recorded_task: Option<Task> = serde_json::from_value(cp.context["task"].clone()).ok();
        let recorded_group = cp.context["group"].as_str().map(str::to_string);
        let (Some(rt), Some(rg)) = (recorded_task, recorded_group) else {
            return Err(CliError::IncompatibleCheckpoint(format!("{} carries no run configuration", path.display())));
        };
        if task.is_some_and(|t| t != rt) || group.as_ref().is_some_and(|g| *g != rg) {
            return Err(CliError::IncompatibleCheckpoint(format!(
                "{} belongs to {} on {}",
                path.display(),
                serde_json::to_value(rt).unwrap().as_str().unwrap_or_default(),
                rg
            )));
        }
        task = Some(rt);
        group = Some(rg);
    }
    let task = task.ok_or_else(|| CliError::Usage("missing task".into()))?;
    let group = group.ok_or_else(|| CliError::Usage("missing --group".into()))?;
    if let Some(b) = args.budget_seconds {
        if !(b > 0.0 && b.is_finite()) {
            return Err(CliError::Usage("--budget-seconds must be positive".into()));
        }
    }
    if args.node_cap == Some(0) {
        return Err(CliError::Usage("--node-cap must be positive".into()));
    }
    if task == Task::Products && args.sequence.is_none() {
        return Err(CliError::Usage("the products task needs --sequence".into()));
    }
    if args.format == Format::Csv && !task.is_census() {
        return Err(CliError::Usage("csv output is only offered for census tasks".into()));
    }
    if (args.resume || args.checkpoint_dir.is_some()) && !task.searches() {
        return Err(CliError::Usage("checkpoints apply to search tasks only".into()));
    }
    Ok(RunConfig {
        task,
        group,
        budget_seconds: args.budget_seconds,
        node_cap: args.node_cap,
        workers: args.workers.map_or_else(default_workers, |w| w as usize),
        seed: args.seed.unwrap_or(lemma_lab::DEFAULT_SEED),
        trials: args.trials.unwrap_or(lemma_lab::DEFAULT_TRIALS),
        gao_mode: args.gao_mode,
        sequence: args.sequence,
        length: args.length,
        out: args.out,
        checkpoint_dir: args.checkpoint_dir,
        resume: args.resume,
        format: args.format,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub config: RunConfig,
    pub status: Status,
    /// Deterministic for a fixed configuration.
    pub payload: Value,
    /// Version, wall-clock time and every timing field lifted out of the
    /// payload, keyed by its JSON path.
    pub meta: Value,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.payload.get("all_passed") == Some(&Value::Bool(false)) {
            5
        } else if self.status == Status::Partial {
            4
        } else {
            0
        }
    }
}

/// Removes every `seconds` field from `v`, recording it under its path.
fn lift_timings(v: &mut Value, path: &str, out: &mut BTreeMap<String, Value>) {
    match v {
        Value::Object(map) => {
            if let Some(s) = map.remove("seconds") {
                out.insert(format!("{path}/seconds"), s);
            }
            for (k, child) in map.iter_mut() {
                lift_timings(child, &format!("{path}/{k}"), out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter_mut().enumerate() {
                lift_timings(child, &format!("{path}/{i}"), out);
            }
        }
        _ => {}
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report payloads serialize")
}

fn census_payload(group: &Group, theorem: Theorem, c: &Census) -> Value {
    let members: Vec<Value> = c
        .sequences
        .iter()
        .map(|s| {
            let form = classify::recognize(group, theorem, s).ok().flatten();
            json!({ "sequence": s.render(group), "form": form.map(|f| f.tag()) })
        })
        .collect();
    json!({
        "group": c.group,
        "predicate": c.predicate,
        "length": c.length,
        "count": c.sequences.len(),
        "sequences": members,
        "stats": c.stats,
    })
}

fn names(group: &Group, set: crate::ElemSet) -> Vec<String> {
    set.iter().map(|g| group.element_name(g)).collect()
}

fn products_payload(group: &Group, text: &str, length: Option<usize>) -> Result<Value, CliError> {
    let seq = Sequence::parse(group, text).map_err(|e| CliError::Usage(e.to_string()))?;
    let internal = |e: products::ProductError| CliError::Internal(e.to_string());
    let pi = products::pi(group, &seq).map_err(internal)?;
    let pi_all = products::pi_all(group, &seq).map_err(internal)?;
    let pi_n = match length {
        Some(n) => Some(names(group, products::pi_n(group, &seq, n).map_err(|e| CliError::Usage(e.to_string()))?)),
        None => None,
    };
    Ok(json!({
        "group": group.name(),
        "sequence": seq.render(group),
        "length": seq.len(),
        "pi": names(group, pi),
        "pi_all": names(group, pi_all),
        "pi_n": pi_n.map(|set| json!({ "n": length, "set": set })),
        "product_one": pi.contains_identity(),
        "product_one_free": !pi_all.contains_identity(),
    }))
}

fn search_options(cfg: &RunConfig) -> SearchOptions {
    SearchOptions {
        checkpoint: cfg.checkpoint_path(),
        checkpoint_context: cfg.checkpoint_context(),
        ..SearchOptions::default()
            .with_workers(cfg.workers)
            .with_budget(Budget { node_cap: cfg.node_cap, time_limit: cfg.budget_seconds.map(Duration::from_secs_f64) })
    }
}

fn infeasible(group: &Group, e: &InvariantError) -> (Status, Value) {
    (Status::Partial, json!({ "group": group.name(), "infeasible": e.to_string() }))
}

/// Executes a validated configuration.
pub fn run(cfg: &RunConfig) -> Result<Report, CliError> {
    let start = Instant::now();
    let group = Group::from_spec_str(&cfg.group)?;
    let opts = search_options(cfg);
    if let Some(path) = opts.checkpoint.as_ref().filter(|p| !cfg.resume && p.exists()) {
        fs::remove_file(path).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?;
    }
    let (status, payload) = match cfg.task {
        Task::Davenport => {
            let r = invariants::small_davenport(&group, &opts)?;
            (r.status, to_value(&r))
        }
        Task::Gao => match invariants::gao_constant(&group, cfg.gao_mode.into(), &opts) {
            Ok(r) => (r.status, to_value(&r)),
            Err(e @ InvariantError::Infeasible { .. }) => infeasible(&group, &e),
            Err(e) => return Err(e.into()),
        },
        Task::CensusT11 | Task::CensusT12 => {
            let (theorem, result) = if cfg.task == Task::CensusT11 {
                (Theorem::T11, invariants::census_extremal_pof(&group, &opts))
            } else {
                (Theorem::T12, invariants::census_extremal_bigpof(&group, &opts))
            };
            match result {
                Ok(c) => (c.status, census_payload(&group, theorem, &c)),
                Err(e @ InvariantError::Infeasible { .. }) => infeasible(&group, &e),
                Err(e) => return Err(e.into()),
            }
        }
        Task::VerifyT11 | Task::VerifyT12 => {
            let theorem = if cfg.task == Task::VerifyT11 { Theorem::T11 } else { Theorem::T12 };
            let r = classify::verify_theorem(&group, theorem, &opts)?;
            (if r.progress.is_some() { Status::Partial } else { Status::Complete }, to_value(&r))
        }
        Task::Lemmas => {
            let lab = LabConfig { seed: cfg.seed, trials: cfg.trials, ..LabConfig::default() };
            let outcomes = lemma_lab::run_suite(&group, &lab, &SearchOptions::default().with_workers(cfg.workers))?;
            let all_passed = outcomes.iter().all(|o| o.passed());
            (Status::Complete, json!({ "group": group.name(), "all_passed": all_passed, "outcomes": outcomes }))
        }
        Task::Products => (Status::Complete, products_payload(&group, cfg.sequence.as_deref().unwrap_or(""), cfg.length)?),
    };
    let mut payload = payload;
    let mut timings = BTreeMap::new();
    lift_timings(&mut payload, "", &mut timings);
    let meta = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "seconds": start.elapsed().as_secs_f64(),
        "timings": timings,
    });
    Ok(Report { config: cfg.clone(), status, payload, meta })
}

/// The report rendered in the configured format.
pub fn render(report: &Report) -> String {
    let line = |v: &Value| serde_json::to_string(v).expect("json");
    match report.config.format {
        Format::Json => serde_json::to_string_pretty(report).expect("json") + "\n",
        Format::Jsonl => {
            let mut out = String::new();
            let items = report.payload.get("outcomes").or_else(|| report.payload.get("sequences"));
            for item in items.and_then(Value::as_array).into_iter().flatten() {
                out += &line(item);
                out.push('\n');
            }
            out += &line(&to_value(report));
            out.push('\n');
            out
        }
        Format::Csv => {
            let mut out = String::from("index,sequence,form\n");
            let rows = report.payload.get("sequences").and_then(Value::as_array).cloned().unwrap_or_default();
            for (i, row) in rows.iter().enumerate() {
                let form = row["form"].as_str().unwrap_or("");
                out += &format!("{i},{},{form}\n", row["sequence"].as_str().unwrap_or(""));
            }
            out
        }
    }
}

fn emit(report: &Report, out: Option<&Path>) -> std::io::Result<()> {
    let text = render(report);
    match out {
        Some(path) => fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

/// Parses, runs and writes the report; returns the process exit code.
pub fn main_entry<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    if let Err(e) = Args::try_parse_from(&argv) {
        if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
            print!("{e}");
            return 0;
        }
    }
    let result = parse_args(&argv).and_then(|cfg| run(&cfg));
    match result {
        Ok(report) => {
            if let Some(outcomes) = report.payload.get("outcomes").and_then(Value::as_array) {
                for o in outcomes {
                    if let Ok(o) = serde_json::from_value::<lemma_lab::CheckOutcome>(o.clone()) {
                        eprintln!("{}", o.summary());
                    }
                }
            }
            if let Err(e) = emit(&report, report.config.out.as_deref()) {
                eprintln!("zerosum: cannot write report: {e}");
                return 1;
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("zerosum: {e}");
            e.exit_code()
        }
    }
}
