//! Theory synthesis: exact minimum-cost search within a template, and the
//! anytime loop over a stream of templates.

mod engine;
pub mod estimate;
mod general;
mod pinned;
pub mod space;
pub mod templates;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use rayon::prelude::*;

use crate::cost::{cost, CostBreakdown};
use crate::lang::{Atom, Constraint, LangError, Rule, SensorySequence, Template, Theory, TypeSignature};
use crate::trace::TraceOptions;
use crate::unity::{unified_with, UnityOptions};

use engine::{CRule, Grounding, SchemeCtx};
pub use estimate::{grounding_estimate, GroundingEstimate};
pub use space::{
    canonical_rule, enumerate_constraint_schemes, prune_ruleset_symmetry, prune_variable_symmetry, HypothesisSpace,
    SpaceOptions,
};
pub use templates::{enumerate_templates, TemplateSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Minimize cost subject to covering the sequence.
    Exact,
    /// Minimize cost plus `beta` per unexplained sensory atom.
    Noise,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Budget {
    /// Wall clock for a whole call.
    pub time_limit: Option<Duration>,
    /// Search nodes per template.
    pub node_limit: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub mode: Mode,
    pub beta: usize,
    pub covering: bool,
    pub conceptual_unity: bool,
    pub spatial_unity: bool,
    pub cost_minimization: bool,
    pub symmetry_breaking: bool,
    pub redundancy_pruning: bool,
    /// See `SpaceOptions::causal_head_exclusion`.
    pub causal_head_exclusion: bool,
    /// Use the set-cover path where it applies.
    pub fast_path: bool,
    pub budget: Budget,
    pub threads: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: Mode::Exact,
            beta: 1,
            covering: true,
            conceptual_unity: true,
            spatial_unity: true,
            cost_minimization: true,
            symmetry_breaking: true,
            redundancy_pruning: true,
            causal_head_exclusion: false,
            fast_path: true,
            budget: Budget::default(),
            threads: 1,
        }
    }
}

impl SearchConfig {
    pub fn unity_options(&self) -> UnityOptions {
        UnityOptions {
            spatial: self.spatial_unity,
            conceptual: self.conceptual_unity,
            ..UnityOptions::default()
        }
    }
}

/// What to explain: the sensory sequence over its sensor signature, plus
/// any background facts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Problem {
    pub signature: TypeSignature,
    pub sequence: SensorySequence,
    pub facts: BTreeSet<Atom>,
}

impl Problem {
    pub fn new(signature: TypeSignature, sequence: SensorySequence) -> Problem {
        Problem {
            signature,
            sequence,
            facts: BTreeSet::new(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    /// The search space was covered and the best theory is optimal.
    Found,
    /// The search space was covered and holds no acceptable theory.
    Exhausted,
    /// A budget ran out; `best` is the incumbent, if any.
    Timeout,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Found => "found",
            Status::Exhausted => "exhausted",
            Status::Timeout => "timeout",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best: Option<(Theory, CostBreakdown)>,
    pub templates_tried: usize,
    pub nodes_expanded: u64,
    pub wall_time: Duration,
    pub status: Status,
}

impl SearchResult {
    /// The minimized objective of the best theory.
    pub fn score(&self, config: &SearchConfig) -> Option<usize> {
        self.best.as_ref().map(|(_, c)| objective(c, config))
    }
}

fn objective(c: &CostBreakdown, config: &SearchConfig) -> usize {
    match config.mode {
        Mode::Exact => c.total,
        Mode::Noise => c.noise_total(config.beta),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("template: {0}")]
    Template(#[from] LangError),
    #[error("sequence does not fit the template: {0}")]
    Mismatch(String),
}

struct Incumbent {
    score: usize,
    inits: BTreeSet<Atom>,
    rules: Vec<Rule>,
    constraints: BTreeSet<Constraint>,
    discrepancies: usize,
}

/// Mutable state of one template search.
pub(crate) struct Search<'a> {
    g: &'a Grounding,
    /// Observations as bitsets, index t-1.
    obs: Vec<FixedBitSet>,
    config: &'a SearchConfig,
    template: &'a Template,
    deadline: Option<Instant>,
    shared: Option<&'a AtomicUsize>,
    own_limit: usize,
    best: Option<Incumbent>,
    nodes: u64,
    timed_out: bool,
    done: bool,
}

impl<'a> Search<'a> {
    /// Exclusive upper bound on the score of anything worth finding. A
    /// shared bound from other templates is inclusive so that equal-cost
    /// theories still reach the final tie-break.
    fn limit(&self) -> usize {
        let shared = self.shared.map_or(usize::MAX, |s| s.load(Ordering::Relaxed).saturating_add(1));
        self.own_limit.min(shared)
    }

    fn halted(&self) -> bool {
        self.timed_out || self.done
    }

    /// Counts a node; false once a budget is spent.
    fn tick(&mut self) -> bool {
        if self.halted() {
            return false;
        }
        self.nodes += 1;
        if let Some(n) = self.config.budget.node_limit {
            if self.nodes > n {
                self.timed_out = true;
            }
        }
        if self.nodes % 512 == 0 {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                }
            }
        }
        !self.timed_out
    }

    fn offer(
        &mut self,
        score: usize,
        init: &FixedBitSet,
        rules: Vec<Rule>,
        constraints: &BTreeSet<Constraint>,
        discrepancies: usize,
    ) {
        if score >= self.limit() {
            return;
        }
        self.best = Some(Incumbent {
            score,
            inits: self.g.set(init),
            rules,
            constraints: constraints.clone(),
            discrepancies,
        });
        self.own_limit = score;
        if let Some(s) = self.shared {
            s.fetch_min(score, Ordering::Relaxed);
        }
        if !self.config.cost_minimization {
            self.done = true;
        }
    }
}

/// Minimum-cost theory conforming to one template.
pub fn solve_template(problem: &Problem, template: &Template, config: &SearchConfig) -> Result<SearchResult, SynthError> {
    let deadline = config.budget.time_limit.map(|d| Instant::now() + d);
    solve_inner(problem, template, config, deadline, None)
}

fn solve_inner(
    problem: &Problem,
    template: &Template,
    config: &SearchConfig,
    deadline: Option<Instant>,
    shared: Option<&AtomicUsize>,
) -> Result<SearchResult, SynthError> {
    let start = Instant::now();
    template.validate()?;
    let sig = &template.signature;
    for (t, state) in problem.sequence.steps.iter().enumerate() {
        for a in state {
            sig.check_ground(a)
                .map_err(|e| SynthError::Mismatch(format!("step {}: {a}: {e}", t + 1)))?;
        }
    }
    for a in &problem.facts {
        sig.check_ground(a).map_err(|e| SynthError::Mismatch(format!("fact {a}: {e}")))?;
    }
    let given: BTreeSet<String> = problem.facts.iter().map(|a| a.pred.clone()).collect();
    let space = HypothesisSpace::new(
        template,
        &given,
        SpaceOptions {
            symmetry_breaking: config.symmetry_breaking,
            redundancy_pruning: config.redundancy_pruning,
            partial_schemes: !config.conceptual_unity,
            causal_head_exclusion: config.causal_head_exclusion,
        },
    );
    let g = Grounding::new(sig, &problem.facts);
    let mut obs: Vec<FixedBitSet> = problem.sequence.steps.iter().map(|s| g.bits(s)).collect();
    if obs.is_empty() {
        obs.push(g.empty());
    }
    let mut search = Search {
        g: &g,
        obs,
        config,
        template,
        deadline,
        shared,
        own_limit: usize::MAX,
        best: None,
        nodes: 0,
        timed_out: false,
        done: false,
    };
    let mut compiled: BTreeMap<Rule, CRule> = BTreeMap::new();
    let mut table = None;
    let mut pending = Vec::new();
    for scheme in &space.constraint_schemes {
        if search.halted() {
            break;
        }
        let sc = SchemeCtx::new(&g, scheme, true);
        let rules = space.rules_for(scheme);
        let mut min_static = 0;
        if let Some(observed) = pinned::applicable(&search, &sc) {
            let tab = table.get_or_insert_with(|| pinned::SubstTable::new(&search));
            pinned::run(&mut search, &sc, &rules, tab, observed);
            min_static = 1;
        }
        if min_static > template.n_static || search.halted() {
            continue;
        }
        // Grounding is the costly part for wide templates, so rules are
        // compiled on first use and the deadline is checked as we go.
        for r in &rules {
            if !compiled.contains_key(r) {
                if search.deadline.is_some_and(|d| Instant::now() >= d) {
                    search.timed_out = true;
                    break;
                }
                compiled.insert(r.clone(), CRule::new(&g, r.clone()));
            }
        }
        pending.push((sc, rules, min_static));
    }
    if !search.halted() {
        let plans: Vec<general::Plan> = pending
            .into_iter()
            .filter_map(|(sc, rules, min_static)| {
                let usable: Vec<&CRule> = rules.iter().map(|r| &compiled[r]).collect();
                general::Plan::new(&search, sc, &usable, min_static)
            })
            .collect();
        for c in 0..=general::max_rule_cost(template) {
            if search.halted() {
                break;
            }
            for plan in &plans {
                plan.level(&mut search, c);
            }
        }
    }
    let status = if search.timed_out {
        Status::Timeout
    } else if search.best.is_some() {
        Status::Found
    } else {
        Status::Exhausted
    };
    let best = search.best.take().map(|inc| {
        let mut th = Theory::new(sig.clone());
        th.inits = inc.inits;
        th.rules = inc.rules.into_iter().collect();
        th.constraints = inc.constraints;
        th.facts = problem.facts.clone();
        let mut c = cost(&th);
        if config.mode == Mode::Noise {
            c.noise_discrepancies = Some(inc.discrepancies);
        }
        debug_assert_eq!(objective(&c, config), inc.score);
        verify(&th, problem, config);
        (th, c)
    });
    Ok(SearchResult {
        best,
        templates_tried: 1,
        nodes_expanded: search.nodes,
        wall_time: start.elapsed(),
        status,
    })
}

/// Every result is re-checked by the reference interpreter and unity checks.
fn verify(th: &Theory, problem: &Problem, config: &SearchConfig) {
    let report = unified_with(th, &problem.sequence, config.unity_options(), TraceOptions::default());
    let ok = report.unified() && (config.mode == Mode::Noise || !config.covering || report.covers);
    assert!(ok, "search produced a theory the checker rejects:\n{th}\n{report}");
}

/// Anytime search over a stream of templates. Keeps the best theory by
/// objective, then by canonical serialization.
pub fn apperceive(problem: &Problem, source: &TemplateSource, config: &SearchConfig) -> Result<SearchResult, SynthError> {
    let start = Instant::now();
    let deadline = config.budget.time_limit.map(|d| start + d);
    let templates = enumerate_templates(source, problem)?;
    let shared = AtomicUsize::new(usize::MAX);
    let mut best: Option<(usize, String, Theory, CostBreakdown)> = None;
    let mut nodes = 0;
    let mut tried = 0;
    let mut timed_out = false;
    let threads = config.threads.max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool");
    for batch in templates.chunks(threads) {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            timed_out = true;
            break;
        }
        let results: Vec<Result<SearchResult, SynthError>> = pool.install(|| {
            batch
                .par_iter()
                .map(|t| solve_inner(problem, t, config, deadline, Some(&shared)))
                .collect()
        });
        for r in results {
            let r = r?;
            tried += 1;
            nodes += r.nodes_expanded;
            timed_out |= r.status == Status::Timeout;
            if let Some((th, c)) = r.best {
                let key = (objective(&c, config), th.to_string());
                if best.as_ref().map_or(true, |b| (key.0, &key.1) < (b.0, &b.1)) {
                    best = Some((key.0, key.1, th, c));
                }
            }
        }
        if best.is_some() && !config.cost_minimization {
            break;
        }
    }
    let status = if timed_out {
        Status::Timeout
    } else if best.is_some() {
        Status::Found
    } else {
        Status::Exhausted
    };
    Ok(SearchResult {
        best: best.map(|(_, _, th, c)| (th, c)),
        templates_tried: tried,
        nodes_expanded: nodes,
        wall_time: start.elapsed(),
        status,
    })
}
