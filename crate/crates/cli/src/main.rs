//! `appc`: generate tasks, search for theories, trace and check them, and
//! run evaluation suites.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use appc_core::domains::binding::binding_generate;
use appc_core::domains::eca::{eca_task, parse_bits};
use appc_core::domains::occlusion::{occlusion_generate, Direction, Mover};
use appc_core::domains::rhythm::{rhythm_tune_task_kind, NoteEvent, DRUMS, TUNE_NOTES, TWINKLE};
use appc_core::domains::seek_whence::{seek_whence_task_kind, SEQUENCES};
use appc_core::domains::{builtin_template_text, ApperceptionTask, TaskKind, TemplateRef};
use appc_core::eval::noise::{noise_sweep, write_sweep, SweepConfig};
use appc_core::eval::{
    evaluate, load_suite, make_task, parse_systems, run_suite, summarize, write_records, write_summary, Ablation,
    SuiteConfig, SuiteTask, System,
};
use appc_core::lang::{parse_sequence, parse_templates, parse_theory, write_state, SensorySequence, Template};
use appc_core::synth::{apperceive, grounding_estimate, Budget, Mode, SearchConfig, Status, TemplateSource};
use appc_core::trace::trace;
use appc_core::unity::unified;

#[derive(Parser)]
#[command(name = "appc", version, about = "Synthesize unified causal theories from symbolic sensory sequences")]
struct Cli {
    /// Seed for every randomized choice (initial rows, imputation masks).
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for solve and eval; 1 is the reference behaviour.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    /// Print diagnostics to standard error.
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a task file for one of the experimental domains.
    #[command(subcommand)]
    Generate(Generate),
    /// Search for the cheapest unified theory explaining a task.
    Solve(SolveArgs),
    /// Print the trace of a theory.
    Trace {
        #[arg(long)]
        theory: PathBuf,
        #[arg(long, default_value_t = 10)]
        steps: usize,
    },
    /// Check a theory against a task or sequence file.
    Check {
        #[arg(long)]
        theory: PathBuf,
        /// A task file, or a file of `at` lines.
        #[arg(long)]
        task: PathBuf,
    },
    /// Run systems over a directory of task files and write CSV reports.
    Eval(EvalArgs),
    /// Accuracy of exact and noise-tolerant search on mislabelled sequences.
    Noise(NoiseArgs),
    /// Closed-form grounding sizes for a template.
    Estimate {
        /// Template file or `builtin:NAME`.
        #[arg(long)]
        template: String,
        #[arg(long, default_value_t = 10)]
        steps: u64,
        /// Task whose objects are merged into the template.
        #[arg(long)]
        task: Option<PathBuf>,
        /// Adds objects c1..cN of type `cell`.
        #[arg(long)]
        cells: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum HoldOut {
    /// Prediction: the last step.
    Last,
    /// Retrodiction: the first step.
    First,
    /// Imputation: seeded random atoms, as many as the last step has.
    Random,
}

impl From<HoldOut> for TaskKind {
    fn from(h: HoldOut) -> TaskKind {
        match h {
            HoldOut::Last => TaskKind::Prediction,
            HoldOut::First => TaskKind::Retrodiction,
            HoldOut::Random => TaskKind::Imputation,
        }
    }
}

#[derive(Args)]
struct Output {
    /// Write here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Generate {
    /// Elementary cellular automaton.
    Eca {
        #[arg(long)]
        rule: u8,
        #[arg(long, default_value_t = 11)]
        cells: usize,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// First row as 0/1 or ./#; random from --seed when absent.
        #[arg(long)]
        init: Option<String>,
        #[arg(long, value_enum, default_value_t = HoldOut::Last)]
        hold_out: HoldOut,
        #[command(flatten)]
        out: Output,
    },
    /// Letter sequence induction.
    Sw {
        /// Letters a-f.
        #[arg(long, conflicts_with = "index")]
        letters: Option<String>,
        /// 1-based index into the built-in benchmark list.
        #[arg(long)]
        index: Option<usize>,
        #[arg(long, value_enum, default_value_t = HoldOut::Last)]
        hold_out: HoldOut,
        #[command(flatten)]
        out: Output,
    },
    /// Loudness sensors driven by key presses.
    Rhythm {
        /// Use the three drum sensors instead of the eight notes.
        #[arg(long)]
        drums: bool,
        /// Presses as `time:sensor`, comma separated; the opening of
        /// Twinkle Twinkle by default.
        #[arg(long)]
        presses: Option<String>,
        #[arg(long, default_value_t = 16)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = HoldOut::Last)]
        hold_out: HoldOut,
        #[command(flatten)]
        out: Output,
    },
    /// Cellular automaton seen through light and touch sensors.
    Binding {
        #[arg(long, default_value_t = 110)]
        rule: u8,
        #[arg(long, default_value = "00000100000")]
        init: String,
        /// 1-based cells carrying a touch sensor, comma separated.
        #[arg(long, default_value = "3,11")]
        touch: String,
        #[arg(long, default_value_t = 11)]
        steps: usize,
        #[arg(long, value_enum, default_value_t = HoldOut::Last)]
        hold_out: HoldOut,
        #[command(flatten)]
        out: Output,
    },
    /// Objects moving along grid rows, partly hidden behind each other.
    Occlusion {
        #[arg(long, default_value_t = 5)]
        width: usize,
        #[arg(long, default_value_t = 2)]
        height: usize,
        /// `row,start,left|right,speed[,every]` with 1-based row and start.
        #[arg(long = "mover", required = true)]
        movers: Vec<String>,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        #[command(flatten)]
        out: Output,
    },
    /// A directory of desk-scale tasks for every domain.
    Suite {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value = "0,204,110,245")]
        rules: String,
        #[arg(long, default_value_t = 5)]
        cells: usize,
        #[arg(long, default_value_t = 8)]
        steps: usize,
        /// Random initial rows per rule.
        #[arg(long, default_value_t = 20)]
        per_rule: usize,
        #[arg(long, value_enum, default_value_t = HoldOut::Last)]
        hold_out: HoldOut,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    /// Weight of one unexplained sensory atom in noise mode.
    #[arg(long, default_value_t = 1)]
    beta: usize,
    /// Wall-clock limit per search, in seconds.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Search nodes per template.
    #[arg(long)]
    node_limit: Option<u64>,
    /// Accept theories that do not cover the sequence.
    #[arg(long)]
    no_covering: bool,
    #[arg(long)]
    no_conceptual_unity: bool,
    #[arg(long)]
    no_spatial_unity: bool,
    /// Stop at the first acceptable theory.
    #[arg(long)]
    no_cost_min: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Noise,
}

impl SearchArgs {
    fn config(&self, threads: usize) -> SearchConfig {
        SearchConfig {
            mode: match self.mode {
                ModeArg::Exact => Mode::Exact,
                ModeArg::Noise => Mode::Noise,
            },
            beta: self.beta,
            covering: !self.no_covering,
            conceptual_unity: !self.no_conceptual_unity,
            spatial_unity: !self.no_spatial_unity,
            cost_minimization: !self.no_cost_min,
            budget: Budget {
                time_limit: self.time_limit.map(Duration::from_secs_f64),
                node_limit: self.node_limit,
            },
            threads,
            ..SearchConfig::default()
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    task: PathBuf,
    /// `auto`, `builtin:NAME` or a template file; the task's own line by default.
    #[arg(long)]
    templates: Option<String>,
    #[command(flatten)]
    search: SearchArgs,
    /// Theory file to write; standard output by default.
    #[arg(long)]
    out: Option<PathBuf>,
    /// One-row CSV with the scored outcome.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    suite: PathBuf,
    #[arg(long, default_value = "engine,constant,inertia")]
    systems: String,
    /// Re-split every task this way; each task's own kind by default.
    #[arg(long)]
    kind: Option<TaskKind>,
    #[command(flatten)]
    search: SearchArgs,
    /// Per-task records; standard output by default.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-domain accuracy, kappa and McNemar rows.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Args)]
struct NoiseArgs {
    /// Periodic letter patterns, comma separated; ten built-ins by default.
    #[arg(long)]
    patterns: Option<String>,
    #[arg(long, default_value_t = 30)]
    length: usize,
    #[arg(long, default_value = "0,10,20,30,40,50")]
    percents: String,
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    #[arg(long, default_value_t = 4)]
    max_latent: usize,
    /// Seconds per search.
    #[arg(long, default_value_t = 30.0)]
    time_limit: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failure kinds mapped to exit codes.
enum Failure {
    /// Exit 1: the inputs were fine but the answer is negative.
    Task(String),
    /// Exit 2: bad arguments or unreadable inputs.
    Usage(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Failure {
        Failure::Usage(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Task(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Generate(g) => generate(cli, g)?,
        Command::Solve(a) => return solve(cli, a),
        Command::Trace { theory, steps } => {
            let th = parse_theory(&read(theory)?).map_err(|e| anyhow!("{}: {e}", theory.display()))?;
            let tr = trace(&th, *steps).map_err(|e| Failure::Task(format!("trace stopped: {e}")))?;
            let mut s = String::new();
            for (i, st) in tr.states.iter().enumerate() {
                write_state(&mut s, "at", i + 1, st).unwrap();
            }
            if let Some((start, len)) = tr.period {
                writeln!(s, "period {start} {len}").unwrap();
            }
            print!("{s}");
        }
        Command::Check { theory, task } => {
            let th = parse_theory(&read(theory)?).map_err(|e| anyhow!("{}: {e}", theory.display()))?;
            let seq = read_sequence(task)?;
            let report = unified(&th, &seq);
            print!("{report}");
            if !(report.unified() && report.covers) {
                return Err(Failure::Task("the theory does not make sense of the sequence".into()));
            }
        }
        Command::Eval(a) => eval(cli, a)?,
        Command::Noise(a) => {
            let cfg = SweepConfig {
                patterns: match &a.patterns {
                    Some(p) => p.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect(),
                    None => SweepConfig::default().patterns,
                },
                length: a.length,
                percents: parse_list(&a.percents)?,
                repeats: a.repeats,
                max_latent: a.max_latent,
                time_limit: Some(Duration::from_secs_f64(a.time_limit)),
                seed: cli.seed,
            };
            if cfg.length < 2 {
                return Err(anyhow!("--length must be at least 2").into());
            }
            let points = noise_sweep(&cfg);
            emit(a.out.as_deref(), |w| write_sweep(w, &points).map_err(Into::into))?;
        }
        Command::Estimate {
            template,
            steps,
            task,
            cells,
        } => {
            let mut ts = load_templates(template, None)?;
            if ts.is_empty() {
                return Err(anyhow!("no template in {template}").into());
            }
            if let Some(p) = task {
                let t = read_task(p)?;
                for tm in &mut ts {
                    tm.signature.extend(&t.signature).map_err(|e| anyhow!("{e}"))?;
                }
            }
            if let Some(n) = cells {
                for tm in &mut ts {
                    if !tm.signature.types.contains("cell") {
                        return Err(anyhow!("--cells needs a template with type `cell`").into());
                    }
                    for i in 1..=*n {
                        let name = format!("c{i}");
                        if !tm.signature.objects.contains_key(&name) {
                            tm.signature.add_object(&name, "cell").map_err(|e| anyhow!("{e}"))?;
                        }
                    }
                }
            }
            for (i, tm) in ts.iter().enumerate() {
                if ts.len() > 1 {
                    println!("template {}", i + 1);
                }
                print!("{}", grounding_estimate(tm, *steps));
            }
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn read_task(path: &Path) -> Result<ApperceptionTask> {
    ApperceptionTask::parse(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))
}

/// A task file's visible part, or a plain file of `at` lines.
fn read_sequence(path: &Path) -> Result<SensorySequence> {
    let text = read(path)?;
    match ApperceptionTask::parse(&text) {
        Ok(t) => Ok(t.visible),
        Err(task_err) => parse_sequence(&text).map_err(|_| anyhow!("{}: {task_err}", path.display())),
    }
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse().with_context(|| format!("`{x}` is not a number")))
        .collect()
}

fn load_templates(spec: &str, base: Option<&Path>) -> Result<Vec<Template>> {
    let text = match TemplateRef::parse(spec) {
        TemplateRef::Builtin(n) => builtin_template_text(&n)
            .ok_or_else(|| anyhow!("no built-in template `{n}`"))?
            .to_string(),
        TemplateRef::File(p) => read(&base.map_or_else(|| PathBuf::from(&p), |b| b.join(&p)))?,
        TemplateRef::Auto => bail!("`auto` is not a template file"),
    };
    parse_templates(&text).map_err(|e| anyhow!("{spec}: {e}"))
}

/// Writes through `f` to the file, or to standard output.
fn emit(path: Option<&Path>, f: impl FnOnce(&mut dyn std::io::Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let mut file = fs::File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            f(&mut file)
        }
        None => f(&mut std::io::stdout().lock()),
    }
}

fn write_text(path: Option<&Path>, text: &str) -> Result<()> {
    emit(path, |w| w.write_all(text.as_bytes()).map_err(Into::into))
}

fn generate(cli: &Cli, g: &Generate) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let (task, out) = match g {
        Generate::Eca {
            rule,
            cells,
            steps,
            init,
            hold_out,
            out,
        } => {
            let row = match init {
                Some(s) => parse_bits(s).ok_or_else(|| anyhow!("--init must use 0/1 or ./#"))?,
                None => (0..*cells).map(|_| rng.gen()).collect(),
            };
            if row.len() != *cells {
                bail!("--init has {} cells but --cells is {cells}", row.len());
            }
            check_steps(*steps)?;
            (eca_task(*rule, &row, *steps, (*hold_out).into(), cli.seed), out)
        }
        Generate::Sw {
            letters,
            index,
            hold_out,
            out,
        } => {
            let s = match (letters, index) {
                (Some(l), _) => l.clone(),
                (None, Some(i)) if (1..=SEQUENCES.len()).contains(i) => SEQUENCES[i - 1].to_string(),
                (None, Some(i)) => bail!("--index {i} is outside 1..{}", SEQUENCES.len()),
                (None, None) => bail!("give --letters or --index"),
            };
            check_steps(s.len())?;
            (seek_whence_task_kind(&s, (*hold_out).into(), cli.seed)?, out)
        }
        Generate::Rhythm {
            drums,
            presses,
            steps,
            hold_out,
            out,
        } => {
            let sensors: &[&str] = if *drums { &DRUMS } else { &TUNE_NOTES };
            let events: Vec<NoteEvent> = match presses {
                Some(p) => p
                    .split(',')
                    .filter(|x| !x.trim().is_empty())
                    .map(|x| {
                        let (t, s) = x.trim().split_once(':').ok_or_else(|| anyhow!("press `{x}` is not time:sensor"))?;
                        Ok(NoteEvent::press(t.parse().with_context(|| format!("bad time in `{x}`"))?, s))
                    })
                    .collect::<Result<_>>()?,
                None if *drums => bail!("--drums needs --presses"),
                None => TWINKLE.iter().map(|&(t, s)| NoteEvent::press(t, s)).collect(),
            };
            check_steps(*steps)?;
            (rhythm_tune_task_kind(sensors, *steps, &events, (*hold_out).into(), cli.seed)?, out)
        }
        Generate::Binding {
            rule,
            init,
            touch,
            steps,
            hold_out,
            out,
        } => {
            let row = parse_bits(init).ok_or_else(|| anyhow!("--init must use 0/1 or ./#"))?;
            let positions: Vec<usize> = parse_list(touch)?
                .into_iter()
                .map(|p| p.checked_sub(1).ok_or_else(|| anyhow!("touch positions are 1-based")))
                .collect::<Result<_>>()?;
            check_steps(*steps)?;
            (binding_generate(*rule, &row, &positions, *steps, (*hold_out).into(), cli.seed)?, out)
        }
        Generate::Occlusion {
            width,
            height,
            movers,
            steps,
            out,
        } => {
            let ms = movers.iter().map(|m| parse_mover(m)).collect::<Result<Vec<_>>>()?;
            check_steps(*steps)?;
            (occlusion_generate(*width, *height, &ms, *steps)?, out)
        }
        Generate::Suite {
            out,
            rules,
            cells,
            steps,
            per_rule,
            hold_out,
        } => {
            let n = write_suite(out, &parse_list(rules)?, *cells, *steps, *per_rule, (*hold_out).into(), cli.seed)?;
            if cli.verbose {
                eprintln!("wrote {n} tasks under {}", out.display());
            }
            return Ok(());
        }
    };
    write_text(out.out.as_deref(), &task.to_string())
}

fn check_steps(n: usize) -> Result<()> {
    if n < 2 {
        bail!("a task needs at least two steps");
    }
    Ok(())
}

fn parse_mover(s: &str) -> Result<Mover> {
    let f: Vec<&str> = s.split(',').map(str::trim).collect();
    if !(4..=5).contains(&f.len()) {
        bail!("mover `{s}` is not row,start,left|right,speed[,every]");
    }
    let num = |x: &str| -> Result<usize> { x.parse().with_context(|| format!("`{x}` in mover `{s}` is not a number")) };
    let one_based = |x: &str| -> Result<usize> { num(x)?.checked_sub(1).ok_or_else(|| anyhow!("rows and starts are 1-based")) };
    let direction = match f[2] {
        "left" | "l" => Direction::Left,
        "right" | "r" => Direction::Right,
        d => bail!("direction `{d}` is not left or right"),
    };
    Ok(Mover {
        row: one_based(f[0])?,
        start: one_based(f[1])?,
        direction,
        speed: num(f[3])?,
        every: if f.len() == 5 { num(f[4])? } else { 1 },
    })
}

/// ECA tasks with seeded random rows plus fixed tasks for the other
/// domains. Returns the number of files written.
fn write_suite(dir: &Path, rules: &[usize], cells: usize, steps: usize, per_rule: usize, kind: TaskKind, seed: u64) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut n = 0;
    let mut put = |domain: &str, name: String, task: ApperceptionTask| -> Result<()> {
        let d = dir.join(domain);
        fs::create_dir_all(&d).with_context(|| format!("cannot create {}", d.display()))?;
        fs::write(d.join(format!("{name}.task")), task.to_string())?;
        n += 1;
        Ok(())
    };
    for &rule in rules {
        let rule = u8::try_from(rule).map_err(|_| anyhow!("rule {rule} is outside 0..255"))?;
        for i in 0..per_rule {
            let row: Vec<bool> = (0..cells).map(|_| rng.gen()).collect();
            put("eca", format!("r{rule:03}_{i:02}"), eca_task(rule, &row, steps, kind, seed + i as u64))?;
        }
    }
    for (i, s) in SEQUENCES.iter().enumerate() {
        put("sw", format!("sw{:02}", i + 1), seek_whence_task_kind(s, kind, seed)?)?;
    }
    let twinkle: Vec<NoteEvent> = TWINKLE.iter().map(|&(t, s)| NoteEvent::press(t, s)).collect();
    put("rhythm", "twinkle".into(), rhythm_tune_task_kind(&TUNE_NOTES, 16, &twinkle, kind, seed)?)?;
    let beat: Vec<NoteEvent> = (0..4)
        .flat_map(|b| [NoteEvent::press(4 * b + 1, "sbass"), NoteEvent::press(4 * b + 3, "ssnare")])
        .collect();
    put("rhythm", "backbeat".into(), rhythm_tune_task_kind(&DRUMS, 16, &beat, kind, seed)?)?;
    let init = parse_bits("00000100000").unwrap();
    put("binding", "rule110".into(), binding_generate(110, &init, &[2, 10], 11, kind, seed)?)?;
    let movers = [Mover::new(0, 0, Direction::Right, 1), Mover::new(1, 3, Direction::Left, 1)];
    put("occlusion", "crossing".into(), occlusion_generate(5, 2, &movers, 10)?)?;
    Ok(n)
}

fn solve(cli: &Cli, a: &SolveArgs) -> Result<(), Failure> {
    let mut task = read_task(&a.task)?;
    if let Some(t) = &a.templates {
        task.templates = TemplateRef::parse(t);
    }
    let base = a.task.parent().map(Path::to_path_buf);
    let cfg = a.search.config(cli.threads);
    let source = task.template_source(base.as_deref()).map_err(|e| anyhow!("{e}"))?;
    if cli.verbose {
        if let TemplateSource::Explicit(ts) = &source {
            eprintln!("{} template(s)", ts.len());
        }
    }
    let result = apperceive(&task.problem(), &source, &cfg).map_err(|e| anyhow!("{e}"))?;
    if cli.verbose {
        eprintln!(
            "status {} after {} template(s), {} nodes, {:.3}s",
            result.status,
            result.templates_tried,
            result.nodes_expanded,
            result.wall_time.as_secs_f64()
        );
    }
    if let Some(path) = &a.report {
        let st = SuiteTask {
            id: a.task.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default(),
            domain: "misc".into(),
            task: task.clone(),
            base: base.clone(),
        };
        let rec = evaluate(&st, System::Engine(Ablation::Full), &cfg);
        emit(Some(path), |w| write_records(w, &[rec]).map_err(Into::into))?;
    }
    let Some((th, c)) = result.best else {
        let why = match result.status {
            Status::Timeout => "no theory found within the budget",
            _ => "no unified theory exists in the templates",
        };
        return Err(Failure::Task(why.into()));
    };
    eprintln!("{} cost {} (table complexity {})", result.status, c.total, c.table_complexity());
    if let Some(d) = c.noise_discrepancies {
        eprintln!("unexplained atoms {d}");
    }
    if !task.hidden.is_empty() {
        let tr = trace(&th, task.len()).map_err(|e| anyhow!("{e}"))?;
        let hidden_steps: BTreeSet<usize> = task.hidden.iter().map(|(t, _)| *t).collect();
        let mut s = String::new();
        for t in hidden_steps {
            write_state(&mut s, "# predicted", t, tr.at(t)).unwrap();
        }
        eprint!("{s}");
    }
    write_text(a.out.as_deref(), &th.to_string())?;
    Ok(())
}

fn eval(cli: &Cli, a: &EvalArgs) -> Result<()> {
    let mut tasks: Vec<SuiteTask> = load_suite(&a.suite)?;
    if tasks.is_empty() {
        bail!("no .task files under {}", a.suite.display());
    }
    if let Some(kind) = a.kind {
        for t in &mut tasks {
            t.task = make_task(&t.task, kind, cli.seed)?;
        }
    }
    // In eval the ablation flags add system columns; the engine column
    // keeps every part switched on.
    let mut systems = parse_systems(&a.systems)?;
    for (flag, ab) in [
        (a.search.no_covering, Ablation::NoCovering),
        (a.search.no_conceptual_unity, Ablation::NoConceptualUnity),
        (a.search.no_spatial_unity, Ablation::NoSpatialUnity),
        (a.search.no_cost_min, Ablation::NoCostMin),
    ] {
        if flag && !systems.contains(&System::Engine(ab)) {
            systems.push(System::Engine(ab));
        }
    }
    let search = SearchConfig {
        covering: true,
        conceptual_unity: true,
        spatial_unity: true,
        cost_minimization: true,
        ..a.search.config(1)
    };
    let cfg = SuiteConfig {
        search,
        threads: cli.threads,
    };
    if cli.verbose {
        eprintln!("{} tasks x {} systems", tasks.len(), systems.len());
    }
    let records = run_suite(&tasks, &systems, &cfg);
    emit(a.out.as_deref(), |w| write_records(w, &records).map_err(Into::into))?;
    let rows = summarize(&tasks, &records);
    match &a.summary {
        Some(p) => emit(Some(p), |w| write_summary(w, &rows).map_err(Into::into))?,
        None if cli.verbose => write_summary(std::io::stderr(), &rows)?,
        None => {}
    }
    Ok(())
}
