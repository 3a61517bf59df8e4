//! Branch and bound over rule sets by increasing rule cost, each completed by
//! a depth-first search over initial conditions with trace simulation.

use std::collections::BTreeSet;

use fixedbitset::FixedBitSet;

use super::engine::{connected, CRule, SchemeCtx, Sim};
use super::{Mode, Search};
use crate::lang::{RuleKind, Template};

/// Largest rule cost a template allows.
pub(crate) fn max_rule_cost(t: &Template) -> usize {
    (t.n_static + t.n_causal) * (1 + t.n_body)
}

/// One constraint scheme with its usable rules, searched level by level so
/// that cheap rule sets under every scheme come before dear ones under any.
pub(crate) struct Plan<'r> {
    pub sc: SchemeCtx,
    statics: Vec<&'r CRule>,
    causals: Vec<&'r CRule>,
    pins: Pins,
    min_static: usize,
    /// Slots no static candidate can fill always cost one initial atom.
    pub lb_inits: usize,
}

impl<'r> Plan<'r> {
    /// None when no rule set under the scheme can meet the first
    /// observation or the static minimum.
    pub fn new(s: &Search, sc: SchemeCtx, rules: &[&'r CRule], min_static: usize) -> Option<Plan<'r>> {
        let statics: Vec<&CRule> = rules.iter().copied().filter(|r| r.kind() == RuleKind::Static).collect();
        let causals: Vec<&CRule> = rules.iter().copied().filter(|r| r.kind() == RuleKind::Causal).collect();
        let t = s.template;
        if min_static > t.n_static || (min_static > 0 && statics.is_empty()) {
            return None;
        }
        let pins = Pins::new(s, &sc)?;
        let derivable: BTreeSet<&str> = statics.iter().map(|r| r.rule.head.pred.as_str()).collect();
        let lb_inits = sc
            .slots
            .iter()
            .filter(|sl| !sl.preds.iter().any(|p| derivable.contains(p.as_str())))
            .count();
        Some(Plan {
            sc,
            statics,
            causals,
            pins,
            min_static,
            lb_inits,
        })
    }

    /// Every rule set of rule cost exactly `c`.
    pub fn level(&self, s: &mut Search, c: usize) {
        if s.halted() || c + self.lb_inits >= s.limit() {
            return;
        }
        let mut e = Enum {
            s,
            sc: &self.sc,
            pins: &self.pins,
            statics: &self.statics,
            causals: &self.causals,
            min_static: self.min_static,
            chosen: Vec::new(),
        };
        e.statics_from(0, c);
    }
}

/// Slot choices forced by the first observation.
struct Pins {
    /// For each slot, the observed atom at step 1, if any.
    slot: Vec<Option<usize>>,
    /// Atoms outside every slot that may start true.
    free: Vec<usize>,
}

impl Pins {
    fn new(s: &Search, sc: &SchemeCtx) -> Option<Pins> {
        let g = s.g;
        let pin = s.config.mode == Mode::Exact && s.config.covering;
        let mut slot = vec![None; sc.slots.len()];
        if pin {
            for a in s.obs[0].ones() {
                if let Some(i) = sc.slot_of[a] {
                    if slot[i].is_some() {
                        return None;
                    }
                    slot[i] = Some(a);
                }
            }
        }
        let free = (0..g.n())
            .filter(|&a| sc.slot_of[a].is_none() && !g.given.contains(&g.atoms[a].pred))
            .collect();
        Some(Pins { slot, free })
    }
}

struct Enum<'s, 'a> {
    s: &'s mut Search<'a>,
    sc: &'s SchemeCtx,
    pins: &'s Pins,
    statics: &'s [&'s CRule],
    causals: &'s [&'s CRule],
    min_static: usize,
    chosen: Vec<&'s CRule>,
}

impl<'s, 'a> Enum<'s, 'a> {
    fn statics_from(&mut self, start: usize, remaining: usize) {
        if self.s.halted() {
            return;
        }
        if self.chosen.len() >= self.min_static {
            self.causals_from(0, remaining, 0);
        }
        if self.chosen.len() == self.s.template.n_static {
            return;
        }
        for i in start..self.statics.len() {
            let r = self.statics[i];
            if r.cost <= remaining {
                self.chosen.push(r);
                self.statics_from(i + 1, remaining - r.cost);
                self.chosen.pop();
                if self.s.halted() {
                    return;
                }
            }
        }
    }

    fn causals_from(&mut self, start: usize, remaining: usize, n: usize) {
        if !self.s.tick() {
            return;
        }
        if remaining == 0 {
            self.evaluate();
            return;
        }
        if n == self.s.template.n_causal || remaining < 2 {
            return;
        }
        for i in start..self.causals.len() {
            let r = self.causals[i];
            if r.cost <= remaining {
                self.chosen.push(r);
                self.causals_from(i + 1, remaining - r.cost, n + 1);
                self.chosen.pop();
                if self.s.halted() {
                    return;
                }
            }
        }
    }

    fn evaluate(&mut self) {
        let rule_cost: usize = self.chosen.iter().map(|r| r.cost).sum();
        let sim = Sim::new(self.s.g, self.sc, &self.chosen);
        let derivable: BTreeSet<&str> = sim.statics.iter().map(|r| r.rule.head.pred.as_str()).collect();
        let mut choices: Vec<Vec<Option<usize>>> = Vec::new();
        for (i, slot) in self.sc.slots.iter().enumerate() {
            let none_ok = slot.preds.iter().any(|p| derivable.contains(p.as_str()));
            let mut opts = Vec::new();
            if none_ok {
                opts.push(None);
            }
            match self.pins.slot[i] {
                Some(a) => opts.push(Some(a)),
                None => opts.extend(slot.atoms.iter().map(|&a| Some(a))),
            }
            choices.push(opts);
        }
        for &a in &self.pins.free {
            choices.push(vec![None, Some(a)]);
        }
        let mut mandatory = vec![0; choices.len() + 1];
        for k in (0..choices.len()).rev() {
            mandatory[k] = mandatory[k + 1] + usize::from(choices[k].iter().all(|o| o.is_some()));
        }
        let mut init = self.s.g.empty();
        let rules: Vec<&CRule> = self.chosen.clone();
        let mut d = InitDfs {
            s: &mut *self.s,
            sim: &sim,
            choices: &choices,
            mandatory: &mandatory,
            rule_cost,
            rules: &rules,
        };
        d.go(0, &mut init, 0);
    }
}

struct InitDfs<'s, 'a> {
    s: &'s mut Search<'a>,
    sim: &'s Sim<'s>,
    choices: &'s [Vec<Option<usize>>],
    mandatory: &'s [usize],
    rule_cost: usize,
    rules: &'s [&'s CRule],
}

impl<'s, 'a> InitDfs<'s, 'a> {
    fn go(&mut self, k: usize, init: &mut FixedBitSet, m: usize) {
        if !self.s.tick() || self.rule_cost + m + self.mandatory[k] >= self.s.limit() {
            return;
        }
        if k == self.choices.len() {
            self.leaf(init, m);
            return;
        }
        for &o in &self.choices[k] {
            match o {
                None => self.go(k + 1, init, m),
                Some(a) => {
                    init.insert(a);
                    self.go(k + 1, init, m + 1);
                    init.set(a, false);
                }
            }
        }
    }

    fn leaf(&mut self, init: &FixedBitSet, m: usize) {
        let base = self.rule_cost + m;
        let Some(disc) = simulate(self.s, self.sim, init, base) else { return };
        let score = base + self.s.config.beta * disc;
        let rules = self.rules.iter().map(|r| r.rule.clone()).collect();
        self.s.offer(score, init, rules, &self.sim.sc.constraints, disc);
    }
}

/// Runs the trace over the sequence. Returns the number of unexplained
/// sensory atoms, or None when unity or covering fails or the bound is hit.
pub(crate) fn simulate(s: &Search, sim: &Sim, init: &FixedBitSet, base: usize) -> Option<usize> {
    let cfg = s.config;
    let exact = cfg.mode == Mode::Exact;
    let mut disc = 0;
    let mut state = sim.first(init)?;
    for (t, obs) in s.obs.iter().enumerate() {
        if t > 0 {
            state = sim.step(&state)?;
        }
        if !sim.sc.total(&state) || (cfg.spatial_unity && !connected(s.g, &state)) {
            return None;
        }
        if exact {
            if cfg.covering && !obs.is_subset(&state) {
                return None;
            }
        } else {
            disc += obs.difference(&state).count();
            if base + cfg.beta * disc >= s.limit() {
                return None;
            }
        }
    }
    Some(disc)
}
