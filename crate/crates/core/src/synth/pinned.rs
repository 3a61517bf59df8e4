//! Exact search for causal-only theories when every fluent slot is observed
//! at every step. The trace is then fixed by the observations up to the
//! choice of permanent atoms, and choosing rules becomes a weighted set
//! cover of the observed changes by rules that never predict wrongly.

use std::collections::HashMap;

use fixedbitset::FixedBitSet;

use super::engine::{connected, CRule, SchemeCtx, Sim};
use super::general::simulate;
use super::{Mode, Search};
use crate::lang::{apply_subst, Rule, RuleKind};

/// Ground index of every unground atom under every substitution.
pub(crate) struct SubstTable {
    pub n_subst: usize,
    /// `gmap[u][k]`
    pub gmap: Vec<Vec<usize>>,
}

impl SubstTable {
    pub fn new(s: &Search) -> SubstTable {
        let g = s.g;
        let subs = g.sig.substitutions();
        let gmap = g
            .unground
            .iter()
            .map(|u| subs.iter().map(|sub| g.index[&apply_subst(u, sub).expect("total substitution")]).collect())
            .collect();
        SubstTable {
            n_subst: subs.len(),
            gmap,
        }
    }
}

/// Whether the pinned path decides this scheme on its own for causal-only
/// rule sets. Returns how many leading steps are fully observed; the steps
/// after them must be empty and are checked by simulation.
pub(crate) fn applicable(s: &Search, sc: &SchemeCtx) -> Option<usize> {
    let cfg = s.config;
    if cfg.mode != Mode::Exact || !cfg.covering || !cfg.fast_path {
        return None;
    }
    let g = s.g;
    if (0..g.n()).any(|a| sc.slot_of[a].is_none() && !g.facts.contains(a)) {
        return None;
    }
    let observed = s.obs.iter().rposition(|o| o.count_ones(..) > 0).map_or(0, |i| i + 1);
    if observed == 0 {
        return None;
    }
    // In the unobserved suffix, rules can only add conflicts; connectivity
    // cannot change when no binary atom can change.
    if observed < s.obs.len() && g.sig.predicates.iter().any(|(p, a)| a.len() == 2 && g.fluent(p)) {
        return None;
    }
    let complete = sc.slots.iter().all(|slot| {
        let fluent = slot.preds.iter().any(|p| g.fluent(p));
        !fluent || s.obs[..observed].iter().all(|o| slot.atoms.iter().filter(|&&a| o.contains(a)).count() == 1)
    });
    complete.then_some(observed)
}

pub(crate) fn run(s: &mut Search, sc: &SchemeCtx, rules: &[Rule], table: &SubstTable, observed: usize) {
    let g = s.g;
    let n_slots = sc.slots.len();
    let horizon = observed;
    // Changes between consecutive observations, numbered.
    let mut events: Vec<(usize, usize)> = Vec::new();
    for t in 1..horizon {
        for a in s.obs[t].difference(&s.obs[t - 1]) {
            events.push((t, a));
        }
    }
    let lb = n_slots + if events.is_empty() { 0 } else { 2 };
    if lb >= s.limit() {
        return;
    }
    let event_id: HashMap<(usize, usize), usize> = events.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    // Permanent slots: fixed by an observation, or free.
    let mut perm_slots: Vec<Vec<usize>> = Vec::new();
    for slot in &sc.slots {
        if slot.preds.iter().any(|p| g.fluent(p)) {
            continue;
        }
        let seen: Vec<usize> = slot
            .atoms
            .iter()
            .copied()
            .filter(|&a| s.obs[..observed].iter().any(|o| o.contains(a)))
            .collect();
        match seen.len() {
            0 => perm_slots.push(slot.atoms.clone()),
            1 => perm_slots.push(seen),
            _ => return,
        }
    }
    // Candidate causal rules grouped by body.
    let mut bodies: Vec<Vec<usize>> = Vec::new();
    let mut body_id: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut cands: Vec<(usize, usize, &Rule)> = Vec::new();
    for r in rules.iter().filter(|r| r.kind == RuleKind::Causal) {
        let b: Vec<usize> = r.body.iter().map(|a| g.uindex[a]).collect();
        let next = bodies.len();
        let id = *body_id.entry(b.clone()).or_insert(next);
        if id == next {
            bodies.push(b);
        }
        cands.push((id, g.uindex[&r.head], r));
    }
    let mut ctx = Ctx {
        n_slots,
        events: &events,
        event_id: &event_id,
        bodies: &bodies,
        cands: &cands,
        table,
        observed,
    };
    let mut perm = g.empty();
    perm_dfs(s, sc, &mut ctx, &perm_slots, 0, &mut perm);
}

struct Ctx<'c> {
    n_slots: usize,
    events: &'c [(usize, usize)],
    event_id: &'c HashMap<(usize, usize), usize>,
    bodies: &'c [Vec<usize>],
    cands: &'c [(usize, usize, &'c Rule)],
    table: &'c SubstTable,
    observed: usize,
}

fn perm_dfs(s: &mut Search, sc: &SchemeCtx, ctx: &mut Ctx, slots: &[Vec<usize>], k: usize, perm: &mut FixedBitSet) {
    if s.halted() {
        return;
    }
    if k == slots.len() {
        leaf(s, sc, ctx, perm);
        return;
    }
    for &a in &slots[k] {
        perm.insert(a);
        perm_dfs(s, sc, ctx, slots, k + 1, perm);
        perm.set(a, false);
        if s.halted() {
            return;
        }
    }
}

fn leaf(s: &mut Search, sc: &SchemeCtx, ctx: &Ctx, perm: &FixedBitSet) {
    if !s.tick() {
        return;
    }
    let g = s.g;
    let n_inits = ctx.n_slots;
    if n_inits + if ctx.events.is_empty() { 0 } else { 2 } >= s.limit() {
        return;
    }
    let targets: Vec<FixedBitSet> = s.obs[..ctx.observed]
        .iter()
        .map(|o| {
            let mut a = o.clone();
            a.union_with(perm);
            a.union_with(&g.facts);
            a
        })
        .collect();
    for a in &targets {
        if !sc.consistent(a) || !sc.total(a) || (s.config.spatial_unity && !connected(g, a)) {
            return;
        }
    }
    let mut init = targets[0].clone();
    init.difference_with(&g.facts);
    let horizon = targets.len();
    let ns = ctx.table.n_subst;
    // mask[u][t]: substitutions under which u holds at step t.
    let masks: Vec<Vec<FixedBitSet>> = ctx
        .table
        .gmap
        .iter()
        .map(|row| {
            targets
                .iter()
                .map(|a| {
                    let mut m = FixedBitSet::with_capacity(ns);
                    for (k, &ga) in row.iter().enumerate() {
                        if a.contains(ga) {
                            m.insert(k);
                        }
                    }
                    m
                })
                .collect()
        })
        .collect();
    // Firing sets per body for every transition t -> t+1, filled lazily:
    // most candidates fail soundness at the first transition.
    let steps = horizon.saturating_sub(1);
    let mut fires: Vec<Vec<Option<FixedBitSet>>> = vec![vec![None; steps]; ctx.bodies.len()];
    let mut fire = |b: usize, t: usize| -> FixedBitSet {
        fires[b][t]
            .get_or_insert_with(|| {
                let body = &ctx.bodies[b];
                let mut f = masks[body[0]][t].clone();
                for &u in &body[1..] {
                    f.intersect_with(&masks[u][t]);
                }
                f
            })
            .clone()
    };
    let n_events = ctx.events.len();
    let mut options: Vec<(usize, FixedBitSet, &Rule)> = Vec::new();
    for &(b, h, rule) in ctx.cands {
        let mut cov = FixedBitSet::with_capacity(n_events);
        let mut sound = true;
        for t in 0..steps {
            let f = fire(b, t);
            if !f.is_subset(&masks[h][t + 1]) {
                sound = false;
                break;
            }
            for k in f.ones() {
                if !masks[h][t][k] {
                    if let Some(&e) = ctx.event_id.get(&(t + 1, ctx.table.gmap[h][k])) {
                        cov.insert(e);
                    }
                }
            }
        }
        if sound && cov.count_ones(..) > 0 {
            options.push((1 + rule.body.len(), cov, rule));
        }
    }
    // Dominance assumes every cover is equally valid, which the suffix
    // check breaks.
    let suffix = ctx.observed < s.obs.len();
    let options = if suffix { options } else { undominated(options) };
    let mut covers: Vec<Vec<usize>> = vec![Vec::new(); n_events];
    for (i, (_, cov, _)) in options.iter().enumerate() {
        for e in cov.ones() {
            covers[e].push(i);
        }
    }
    let mut all = FixedBitSet::with_capacity(n_events);
    all.insert_range(..);
    let bound = s.limit() - n_inits;
    let max_rules = s.template.n_causal;
    let mut accept = |s: &mut Search, picked: &[usize]| {
        if !suffix {
            return true;
        }
        let compiled: Vec<CRule> = picked.iter().map(|&i| CRule::new(g, options[i].2.clone())).collect();
        let refs: Vec<&CRule> = compiled.iter().collect();
        let sim = Sim::new(g, sc, &refs);
        simulate(s, &sim, &init, 0).is_some()
    };
    let mut st = Cover {
        options: &options,
        covers: &covers,
        bound,
        max_rules,
        best: None,
    };
    st.go(&all, &mut Vec::new(), 0, s, &mut accept);
    let best = st.best;
    if let Some((cost, picked)) = best {
        let rules = picked.iter().map(|&i| options[i].2.clone()).collect();
        s.offer(n_inits + cost, &init, rules, &sc.constraints, 0);
    }
}

/// Drops options whose coverage is contained in a no-more-expensive one.
fn undominated<'r>(options: Vec<(usize, FixedBitSet, &'r Rule)>) -> Vec<(usize, FixedBitSet, &'r Rule)> {
    let mut keep = vec![true; options.len()];
    for i in 0..options.len() {
        for j in 0..options.len() {
            if i == j || !keep[j] {
                continue;
            }
            let (ci, vi, _) = &options[i];
            let (cj, vj, _) = &options[j];
            let dominated = cj <= ci && vi.is_subset(vj) && (cj < ci || vi != vj || j < i);
            if dominated {
                keep[i] = false;
                break;
            }
        }
    }
    options.into_iter().zip(keep).filter(|(_, k)| *k).map(|(o, _)| o).collect()
}

type Options<'r> = [(usize, FixedBitSet, &'r Rule)];

/// Branch and bound for the cheapest cover of all events.
struct Cover<'o, 'r> {
    options: &'o Options<'r>,
    covers: &'o [Vec<usize>],
    bound: usize,
    max_rules: usize,
    best: Option<(usize, Vec<usize>)>,
}

impl Cover<'_, '_> {
    fn limit(&self) -> usize {
        self.best.as_ref().map_or(self.bound, |b| b.0.min(self.bound))
    }

    fn go(
        &mut self,
        uncovered: &FixedBitSet,
        picked: &mut Vec<usize>,
        cost: usize,
        s: &mut Search,
        accept: &mut dyn FnMut(&mut Search, &[usize]) -> bool,
    ) {
        if uncovered.count_ones(..) == 0 {
            if cost < self.limit() && accept(s, picked) {
                self.best = Some((cost, picked.clone()));
            }
            return;
        }
        if picked.len() == self.max_rules || cost + 2 >= self.limit() || !s.tick() {
            return;
        }
        let e = uncovered
            .ones()
            .min_by_key(|&e| self.covers[e].len())
            .expect("nonempty");
        let mut branch: Vec<usize> = self.covers[e].clone();
        branch.sort_by_key(|&i| (self.options[i].0, i));
        for i in branch {
            let c = self.options[i].0;
            if cost + c >= self.limit() {
                break;
            }
            let mut rest = uncovered.clone();
            rest.difference_with(&self.options[i].1);
            picked.push(i);
            self.go(&rest, picked, cost + c, s, accept);
            picked.pop();
        }
    }
}
