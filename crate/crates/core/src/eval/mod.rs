//! Running the engine and the baselines over task suites, scoring the
//! held-out atoms and aggregating per domain.

pub mod baselines;
pub mod metrics;
pub mod noise;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;

use crate::cost::CostBreakdown;
use crate::domains::{hold_out, task_templates, ApperceptionTask, TaskKind};
use crate::lang::{Atom, LangError};
use crate::synth::{apperceive, grounding_estimate, SearchConfig};
use crate::trace::trace;

pub use baselines::{baseline_constant, baseline_inertia, subject, Prediction};
pub use metrics::{accuracy, discordant, kappa, mcnemar, MetricError};

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("{0}")]
    Lang(#[from] LangError),
    #[error("{0}")]
    Metric(#[from] MetricError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Invalid(String),
}

/// Which part of the engine is switched off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ablation {
    Full,
    NoCovering,
    NoConceptualUnity,
    NoSpatialUnity,
    NoCostMin,
}

impl Ablation {
    pub const ALL: [Ablation; 5] = [
        Ablation::Full,
        Ablation::NoCovering,
        Ablation::NoConceptualUnity,
        Ablation::NoSpatialUnity,
        Ablation::NoCostMin,
    ];

    pub fn apply(self, mut cfg: SearchConfig) -> SearchConfig {
        match self {
            Ablation::Full => {}
            Ablation::NoCovering => cfg.covering = false,
            Ablation::NoConceptualUnity => cfg.conceptual_unity = false,
            Ablation::NoSpatialUnity => cfg.spatial_unity = false,
            Ablation::NoCostMin => cfg.cost_minimization = false,
        }
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum System {
    Engine(Ablation),
    /// Majority reading per sensor.
    Constant,
    Inertia,
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            System::Engine(Ablation::Full) => "engine",
            System::Engine(Ablation::NoCovering) => "engine-no-covering",
            System::Engine(Ablation::NoConceptualUnity) => "engine-no-conceptual-unity",
            System::Engine(Ablation::NoSpatialUnity) => "engine-no-spatial-unity",
            System::Engine(Ablation::NoCostMin) => "engine-no-cost-min",
            System::Constant => "constant",
            System::Inertia => "inertia",
        })
    }
}

impl FromStr for System {
    type Err = EvalError;

    fn from_str(s: &str) -> Result<System, EvalError> {
        let all = Ablation::ALL
            .iter()
            .map(|&a| System::Engine(a))
            .chain([System::Constant, System::Inertia]);
        for sys in all {
            if sys.to_string() == s.trim() {
                return Ok(sys);
            }
        }
        Err(EvalError::Invalid(format!("unknown system `{s}`")))
    }
}

/// Parses a comma-separated system list.
pub fn parse_systems(list: &str) -> Result<Vec<System>, EvalError> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

/// One task of a suite.
#[derive(Debug, Clone)]
pub struct SuiteTask {
    pub id: String,
    pub domain: String,
    pub task: ApperceptionTask,
    /// Directory that relative template paths resolve against.
    pub base: Option<PathBuf>,
}

/// Outcome of one system on one task.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub task: String,
    pub domain: String,
    pub kind: TaskKind,
    pub system: System,
    /// found / exhausted / timeout for the engine, `baseline` otherwise, or
    /// `error: ...` when the task could not be run.
    pub status: String,
    pub all_correct: bool,
    pub atoms_correct: usize,
    pub atoms_total: usize,
    pub cost: Option<CostBreakdown>,
    pub wall_ms: u128,
    /// Ground clauses of the first template times sixteen bytes, as a coarse
    /// indication of the memory an answer-set grounding would need.
    pub memory_estimate: Option<u128>,
}

/// Re-splits the complete sequence of `task` with a new held-out part.
pub fn make_task(task: &ApperceptionTask, kind: TaskKind, seed: u64) -> Result<ApperceptionTask, EvalError> {
    let truth = task.truth();
    if truth.len() < 2 {
        return Err(EvalError::Invalid("a task needs at least two steps".into()));
    }
    Ok(ApperceptionTask::from_truth(
        task.signature.clone(),
        &truth,
        hold_out(&truth, kind, seed),
        task.background.clone(),
        task.templates.clone(),
        kind,
    ))
}

/// Predicates that occur in readings, visible or hidden.
pub fn sensor_preds(task: &ApperceptionTask) -> BTreeSet<String> {
    task.visible
        .steps
        .iter()
        .flatten()
        .chain(task.hidden.iter().map(|(_, a)| a))
        .map(|a| a.pred.clone())
        .collect()
}

/// A hidden atom counts as correct when the prediction for its step holds it
/// and holds no other reading of the same sensor that is not true then.
pub fn score(task: &ApperceptionTask, prediction: &Prediction) -> usize {
    let preds = sensor_preds(task);
    let truth = task.truth();
    task.hidden
        .iter()
        .filter(|(t, a)| {
            let Some(p) = prediction.get(t - 1) else {
                return false;
            };
            p.contains(a)
                && p.iter()
                    .filter(|b| preds.contains(&b.pred) && subject(b) == subject(a))
                    .all(|b| truth.at(*t).contains(b))
        })
        .count()
}

/// Chance that guessing each hidden sensor's reading uniformly among its
/// well-typed alternatives gets every one right.
pub fn random_agreement(task: &ApperceptionTask) -> f64 {
    let preds = sensor_preds(task);
    let mut alternatives: BTreeMap<&str, usize> = BTreeMap::new();
    let ground: Vec<Atom> = task
        .signature
        .ground_atoms()
        .into_iter()
        .filter(|a| preds.contains(&a.pred))
        .collect();
    for a in &ground {
        *alternatives.entry(subject(a)).or_default() += 1;
    }
    task.hidden
        .iter()
        .map(|(_, a)| 1.0 / alternatives.get(subject(a)).copied().unwrap_or(1).max(1) as f64)
        .product()
}

#[derive(Debug, Clone)]
pub struct SuiteConfig {
    /// Applied to every engine run, before the ablation.
    pub search: SearchConfig,
    /// Worker threads; each engine run itself is single-threaded.
    pub threads: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            search: SearchConfig::default(),
            threads: 1,
        }
    }
}

fn record(t: &SuiteTask, system: System) -> EvalRecord {
    EvalRecord {
        task: t.id.clone(),
        domain: t.domain.clone(),
        kind: t.task.kind,
        system,
        status: String::new(),
        all_correct: false,
        atoms_correct: 0,
        atoms_total: t.task.hidden.len(),
        cost: None,
        wall_ms: 0,
        memory_estimate: None,
    }
}

fn finish(mut r: EvalRecord, task: &ApperceptionTask, prediction: &Prediction) -> EvalRecord {
    r.atoms_correct = score(task, prediction);
    r.all_correct = r.atoms_correct == r.atoms_total;
    r
}

/// Runs one system on one task. Failures become records, never errors.
pub fn evaluate(t: &SuiteTask, system: System, search: &SearchConfig) -> EvalRecord {
    let start = Instant::now();
    let mut r = record(t, system);
    let out = match system {
        System::Constant => {
            r.status = "baseline".into();
            finish(r, &t.task, &baseline_constant(&t.task))
        }
        System::Inertia => {
            r.status = "baseline".into();
            finish(r, &t.task, &baseline_inertia(&t.task))
        }
        System::Engine(ab) => match run_engine(t, ab, search, &mut r) {
            Ok(p) => finish(r, &t.task, &p),
            Err(e) => {
                r.status = format!("error: {e}");
                r
            }
        },
    };
    EvalRecord {
        wall_ms: start.elapsed().as_millis(),
        ..out
    }
}

fn run_engine(t: &SuiteTask, ab: Ablation, search: &SearchConfig, r: &mut EvalRecord) -> Result<Prediction, EvalError> {
    let cfg = SearchConfig {
        threads: 1,
        ..ab.apply(search.clone())
    };
    let source = t.task.template_source(t.base.as_deref())?;
    if let Some(first) = task_templates(&t.task, t.base.as_deref())?.first() {
        r.memory_estimate = Some(grounding_estimate(first, t.task.len() as u64).total.saturating_mul(16));
    }
    let result = apperceive(&t.task.problem(), &source, &cfg).map_err(|e| EvalError::Invalid(e.to_string()))?;
    r.status = result.status.to_string();
    let Some((th, c)) = result.best else {
        return Ok(vec![BTreeSet::new(); t.task.len()]);
    };
    r.cost = Some(c);
    let tr = trace(&th, t.task.len()).map_err(|e| EvalError::Invalid(e.to_string()))?;
    Ok(tr.states)
}

/// One record per (task, system), in task-major order whatever the number
/// of threads.
pub fn run_suite(tasks: &[SuiteTask], systems: &[System], config: &SuiteConfig) -> Vec<EvalRecord> {
    let jobs: Vec<(&SuiteTask, System)> = tasks.iter().flat_map(|t| systems.iter().map(move |&s| (t, s))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.threads.max(1))
        .build()
        .expect("thread pool");
    pool.install(|| jobs.par_iter().map(|(t, s)| evaluate(t, *s, &config.search)).collect())
}

/// Loads every `*.task` file under `dir`. The domain is the name of the
/// first subdirectory, or `misc` for files at the top.
pub fn load_suite(dir: &Path) -> Result<Vec<SuiteTask>, EvalError> {
    let mut out = Vec::new();
    for entry in walkdir::WalkDir::new(dir).sort_by_file_name() {
        let entry = entry.map_err(|e| EvalError::Invalid(e.to_string()))?;
        let path = entry.path();
        if !entry.file_type().is_file() || path.extension().is_none_or(|e| e != "task") {
            continue;
        }
        let rel = path.strip_prefix(dir).unwrap_or(path);
        let domain = match rel.components().count() {
            1 => "misc".to_string(),
            _ => rel.components().next().unwrap().as_os_str().to_string_lossy().into_owned(),
        };
        let text = std::fs::read_to_string(path)?;
        let task = ApperceptionTask::parse(&text).map_err(|e| EvalError::Invalid(format!("{}: {e}", path.display())))?;
        out.push(SuiteTask {
            id: rel.with_extension("").to_string_lossy().replace('\\', "/"),
            domain,
            task,
            base: path.parent().map(Path::to_path_buf),
        });
    }
    Ok(out)
}

pub const RECORD_HEADER: [&str; 11] = [
    "task",
    "domain",
    "kind",
    "system",
    "status",
    "all_correct",
    "atoms_correct",
    "atoms_total",
    "cost_total",
    "table_complexity",
    "wall_ms",
];

pub fn write_records(out: impl Write, records: &[EvalRecord]) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RECORD_HEADER)?;
    for r in records {
        w.write_record([
            r.task.clone(),
            r.domain.clone(),
            r.kind.to_string(),
            r.system.to_string(),
            r.status.clone(),
            r.all_correct.to_string(),
            r.atoms_correct.to_string(),
            r.atoms_total.to_string(),
            r.cost.map(|c| c.total.to_string()).unwrap_or_default(),
            r.cost.map(|c| c.table_complexity().to_string()).unwrap_or_default(),
            r.wall_ms.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// McNemar comparison of a system with a baseline over shared tasks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Comparison {
    /// Tasks only the system gets wrong.
    pub b: usize,
    /// Tasks only the baseline gets wrong.
    pub c: usize,
    /// None when the two never disagree.
    pub statistic: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub domain: String,
    pub system: System,
    pub tasks: usize,
    pub accuracy: f64,
    /// Mean per-task random agreement.
    pub random_agreement: f64,
    pub kappa: Option<f64>,
    pub vs_constant: Option<Comparison>,
    pub vs_inertia: Option<Comparison>,
}

/// Per-domain aggregates of `records`; `tasks` supplies random agreement.
pub fn summarize(tasks: &[SuiteTask], records: &[EvalRecord]) -> Vec<SummaryRow> {
    let chance: BTreeMap<&str, f64> = tasks.iter().map(|t| (t.id.as_str(), random_agreement(&t.task))).collect();
    let mut groups: BTreeMap<(&str, System), BTreeMap<&str, bool>> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.domain.as_str(), r.system))
            .or_default()
            .insert(r.task.as_str(), r.all_correct);
    }
    let compare = |mine: &BTreeMap<&str, bool>, domain: &str, base: System| -> Option<Comparison> {
        let theirs = groups.get(&(domain, base))?;
        let shared: Vec<&str> = mine.keys().filter(|k| theirs.contains_key(*k)).copied().collect();
        let a: Vec<bool> = shared.iter().map(|k| mine[k]).collect();
        let b: Vec<bool> = shared.iter().map(|k| theirs[k]).collect();
        let (b, c) = discordant(&a, &b).ok()?;
        Some(Comparison {
            b,
            c,
            statistic: mcnemar(b as f64, c as f64).ok(),
        })
    };
    groups
        .iter()
        .map(|(&(domain, system), outcomes)| {
            let list: Vec<bool> = outcomes.values().copied().collect();
            let rs: Vec<f64> = outcomes.keys().filter_map(|k| chance.get(k).copied()).collect();
            let r = if rs.is_empty() { 0.0 } else { rs.iter().sum::<f64>() / rs.len() as f64 };
            let a = accuracy(&list);
            let vs = |b: System| if b == system { None } else { compare(outcomes, domain, b) };
            SummaryRow {
                domain: domain.to_string(),
                system,
                tasks: list.len(),
                accuracy: a,
                random_agreement: r,
                kappa: kappa(a, r).ok(),
                vs_constant: vs(System::Constant),
                vs_inertia: vs(System::Inertia),
            }
        })
        .collect()
}

pub fn write_summary(out: impl Write, rows: &[SummaryRow]) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "domain",
        "system",
        "tasks",
        "accuracy",
        "random_agreement",
        "kappa",
        "b_constant",
        "c_constant",
        "mcnemar_constant",
        "b_inertia",
        "c_inertia",
        "mcnemar_inertia",
    ])?;
    let opt = |x: Option<f64>| x.map(|v| format!("{v:.4}")).unwrap_or_default();
    let cmp = |c: Option<Comparison>| match c {
        Some(c) => [c.b.to_string(), c.c.to_string(), opt(c.statistic)],
        None => Default::default(),
    };
    for r in rows {
        let mut fields = vec![
            r.domain.clone(),
            r.system.to_string(),
            r.tasks.to_string(),
            format!("{:.4}", r.accuracy),
            format!("{:.6}", r.random_agreement),
            opt(r.kappa),
        ];
        fields.extend(cmp(r.vs_constant));
        fields.extend(cmp(r.vs_inertia));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}
