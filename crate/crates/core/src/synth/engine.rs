//! Dense, index-based representation used inside the search: ground atoms
//! become bit positions, rules become lists of ground instances, and states
//! become bitsets. The transition function mirrors `crate::trace` exactly.

use std::collections::{BTreeSet, HashMap};

use fixedbitset::FixedBitSet;

use crate::lang::{Atom, Constraint, Rule, RuleKind, TypeSignature};
use crate::trace::ground_rule;

/// Ground and unground atoms of a signature, indexed.
pub(crate) struct Grounding {
    pub sig: TypeSignature,
    pub atoms: Vec<Atom>,
    pub index: HashMap<Atom, usize>,
    pub objects: Vec<String>,
    /// For binary atoms, the object indices of both arguments.
    pub edges: Vec<(usize, usize, usize)>,
    pub facts: FixedBitSet,
    pub given: BTreeSet<String>,
    /// U in canonical order.
    pub unground: Vec<Atom>,
    pub uindex: HashMap<Atom, usize>,
}

impl Grounding {
    pub fn new(sig: &TypeSignature, facts: &BTreeSet<Atom>) -> Grounding {
        let atoms: Vec<Atom> = sig.ground_atoms().into_iter().collect();
        let index: HashMap<Atom, usize> = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let objects: Vec<String> = sig.objects.keys().cloned().collect();
        let oidx: HashMap<&str, usize> = objects.iter().enumerate().map(|(i, o)| (o.as_str(), i)).collect();
        let edges = atoms
            .iter()
            .enumerate()
            .filter(|(_, a)| a.arity() == 2)
            .map(|(i, a)| (i, oidx[a.args[0].as_str()], oidx[a.args[1].as_str()]))
            .collect();
        let mut fbits = FixedBitSet::with_capacity(atoms.len());
        for f in facts {
            fbits.insert(index[f]);
        }
        let unground: Vec<Atom> = sig.unground_atoms().into_iter().collect();
        let uindex = unground.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        Grounding {
            sig: sig.clone(),
            atoms,
            index,
            objects,
            edges,
            facts: fbits,
            given: facts.iter().map(|a| a.pred.clone()).collect(),
            unground,
            uindex,
        }
    }

    pub fn n(&self) -> usize {
        self.atoms.len()
    }

    pub fn empty(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.atoms.len())
    }

    pub fn bits(&self, atoms: &BTreeSet<Atom>) -> FixedBitSet {
        let mut b = self.empty();
        for a in atoms {
            b.insert(self.index[a]);
        }
        b
    }

    pub fn set(&self, bits: &FixedBitSet) -> BTreeSet<Atom> {
        bits.ones().map(|i| self.atoms[i].clone()).collect()
    }

    /// Predicates rules may derive: not permanent and not background.
    pub fn fluent(&self, pred: &str) -> bool {
        !self.sig.permanent.contains(pred) && !self.given.contains(pred)
    }
}

/// A totality group: exactly one of `atoms` must hold in every state.
#[derive(Debug, Clone)]
pub(crate) struct Slot {
    pub atoms: Vec<usize>,
    pub preds: Vec<String>,
}

/// Everything that depends on the chosen constraint scheme.
pub(crate) struct SchemeCtx {
    pub constraints: BTreeSet<Constraint>,
    /// Incompossible partners of each ground atom.
    pub rivals: Vec<FixedBitSet>,
    pub slots: Vec<Slot>,
    pub slot_of: Vec<Option<usize>>,
}

impl SchemeCtx {
    pub fn new(g: &Grounding, constraints: &BTreeSet<Constraint>, incompossibility: bool) -> SchemeCtx {
        let n = g.n();
        let mut slots = Vec::new();
        for c in constraints {
            match c {
                Constraint::XorUnary { ty, preds } => {
                    for x in g.sig.objects_of(ty) {
                        slots.push(Slot {
                            atoms: preds.iter().map(|p| g.index[&Atom::unary(p, x)]).collect(),
                            preds: preds.clone(),
                        });
                    }
                }
                Constraint::XorBinary { ty1, ty2, preds } => {
                    for x in g.sig.objects_of(ty1) {
                        for y in g.sig.objects_of(ty2) {
                            slots.push(Slot {
                                atoms: preds.iter().map(|p| g.index[&Atom::binary(p, x, y)]).collect(),
                                preds: preds.clone(),
                            });
                        }
                    }
                }
                Constraint::ExistsUnique { pred } => {
                    let tys = g.sig.arg_types(pred).expect("validated constraint");
                    let ys = g.sig.objects_of(&tys[1]);
                    for x in g.sig.objects_of(&tys[0]) {
                        slots.push(Slot {
                            atoms: ys.iter().map(|y| g.index[&Atom::binary(pred, x, y)]).collect(),
                            preds: vec![pred.clone()],
                        });
                    }
                }
            }
        }
        let mut slot_of = vec![None; n];
        for (i, s) in slots.iter().enumerate() {
            for &a in &s.atoms {
                slot_of[a] = Some(i);
            }
        }
        let mut rivals = vec![FixedBitSet::with_capacity(n); n];
        if incompossibility {
            for s in &slots {
                for &a in &s.atoms {
                    for &b in &s.atoms {
                        if a != b {
                            rivals[a].insert(b);
                        }
                    }
                }
            }
        }
        SchemeCtx {
            constraints: constraints.clone(),
            rivals,
            slots,
            slot_of,
        }
    }

    pub fn consistent(&self, s: &FixedBitSet) -> bool {
        s.ones().all(|a| self.rivals[a].is_disjoint(s))
    }

    pub fn total(&self, s: &FixedBitSet) -> bool {
        self.slots
            .iter()
            .all(|slot| slot.atoms.iter().filter(|&&a| s.contains(a)).count() == 1)
    }
}

/// Union-find connectivity over all objects using binary atoms in `s`.
pub(crate) fn connected(g: &Grounding, s: &FixedBitSet) -> bool {
    let n = g.objects.len();
    if n <= 1 {
        return true;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut comps = n;
    for &(i, a, b) in &g.edges {
        if s.contains(i) {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra] = rb;
                comps -= 1;
                if comps == 1 {
                    return true;
                }
            }
        }
    }
    comps == 1
}

/// A candidate rule with its ground instances over the grounding.
#[derive(Debug, Clone)]
pub(crate) struct CRule {
    pub rule: Rule,
    pub cost: usize,
    pub insts: Vec<(Vec<usize>, usize)>,
}

impl CRule {
    pub fn new(g: &Grounding, rule: Rule) -> CRule {
        let insts = ground_rule(&rule, &g.sig)
            .into_iter()
            .map(|(body, head)| (body.iter().map(|a| g.index[a]).collect(), g.index[&head]))
            .collect();
        CRule {
            cost: 1 + rule.body.len(),
            rule,
            insts,
        }
    }

    pub fn kind(&self) -> RuleKind {
        self.rule.kind
    }
}

/// The transition system for a fixed rule set and scheme.
pub(crate) struct Sim<'a> {
    pub g: &'a Grounding,
    pub sc: &'a SchemeCtx,
    pub statics: Vec<&'a CRule>,
    pub causals: Vec<&'a CRule>,
}

impl<'a> Sim<'a> {
    pub fn new(g: &'a Grounding, sc: &'a SchemeCtx, rules: &[&'a CRule]) -> Sim<'a> {
        Sim {
            g,
            sc,
            statics: rules.iter().copied().filter(|r| r.kind() == RuleKind::Static).collect(),
            causals: rules.iter().copied().filter(|r| r.kind() == RuleKind::Causal).collect(),
        }
    }

    fn closure(&self, s: &mut FixedBitSet) {
        if self.statics.is_empty() {
            return;
        }
        loop {
            let mut changed = false;
            for r in &self.statics {
                for (body, head) in &r.insts {
                    if !s.contains(*head) && body.iter().all(|&b| s.contains(b)) {
                        s.insert(*head);
                        changed = true;
                    }
                }
            }
            if !changed {
                return;
            }
        }
    }

    /// A₁ from the chosen initial atoms, or None on a constraint violation.
    pub fn first(&self, init: &FixedBitSet) -> Option<FixedBitSet> {
        let mut s = init.clone();
        s.union_with(&self.g.facts);
        self.closure(&mut s);
        self.sc.consistent(&s).then_some(s)
    }

    pub fn step(&self, prev: &FixedBitSet) -> Option<FixedBitSet> {
        let mut derived = self.g.facts.clone();
        for r in &self.causals {
            for (body, head) in &r.insts {
                if body.iter().all(|&b| prev.contains(b)) {
                    derived.insert(*head);
                }
            }
        }
        self.closure(&mut derived);
        if !self.sc.consistent(&derived) {
            return None;
        }
        let mut frame = prev.clone();
        frame.difference_with(&self.g.facts);
        let keep: Vec<usize> = frame.ones().filter(|&a| !self.sc.rivals[a].is_disjoint(&derived)).collect();
        for a in keep {
            frame.set(a, false);
        }
        let next = loop {
            let mut x = derived.clone();
            x.union_with(&frame);
            self.closure(&mut x);
            let mut new = x.clone();
            new.difference_with(&frame);
            let drop: Vec<usize> = frame.ones().filter(|&a| !self.sc.rivals[a].is_disjoint(&new)).collect();
            if drop.is_empty() {
                break x;
            }
            for a in drop {
                frame.set(a, false);
            }
        };
        if !self.sc.consistent(&next) {
            return None;
        }
        for a in prev.ones() {
            if !next.contains(a) && self.sc.rivals[a].is_disjoint(&next) {
                return None;
            }
        }
        Some(next)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::Theory;
    use crate::trace::{Interpreter, TraceOptions};
    use proptest::prelude::*;

    fn signature() -> TypeSignature {
        let mut s = TypeSignature::new();
        s.add_type("t").unwrap();
        for o in ["a", "b", "c"] {
            s.add_object(o, "t").unwrap();
        }
        for p in ["p", "q", "s"] {
            s.add_pred(p, &["t"]).unwrap();
        }
        s.add_pred("r", &["t", "t"]).unwrap();
        s.add_var("x", "t").unwrap();
        s.add_var("y", "t").unwrap();
        s
    }

    fn schemes() -> Vec<BTreeSet<Constraint>> {
        let sig = signature();
        let mk = |cs: Vec<Constraint>| cs.into_iter().collect::<BTreeSet<_>>();
        vec![
            mk(vec![]),
            mk(vec![Constraint::xor(&sig, &["p", "q"]).unwrap()]),
            mk(vec![
                Constraint::xor(&sig, &["p", "q", "s"]).unwrap(),
                Constraint::unique(&sig, "r").unwrap(),
            ]),
        ]
    }

    fn theory_strategy() -> impl Strategy<Value = Theory> {
        let sig = signature();
        let ground: Vec<Atom> = sig.ground_atoms().into_iter().collect();
        let unground: Vec<Atom> = sig.unground_atoms().into_iter().collect();
        let n_g = ground.len();
        let n_u = unground.len();
        let rule = (any::<bool>(), proptest::collection::vec(0..n_u, 1..3), 0..n_u);
        (
            proptest::collection::btree_set(0..n_g, 0..6),
            proptest::collection::vec(rule, 0..4),
            0..3usize,
        )
            .prop_map(move |(inits, rules, scheme)| {
                let mut th = Theory::new(signature());
                th.inits = inits.into_iter().map(|i| ground[i].clone()).collect();
                for (causal, body, head) in rules {
                    let kind = if causal { RuleKind::Causal } else { RuleKind::Static };
                    let r = Rule::new(kind, body.iter().map(|&i| unground[i].clone()).collect(), unground[head].clone());
                    if r.is_safe() {
                        th.rules.insert(r);
                    }
                }
                th.constraints = schemes()[scheme].clone();
                th
            })
    }

    proptest! {
        #[test]
        fn compiled_steps_match_the_interpreter(th in theory_strategy()) {
            let g = Grounding::new(&th.signature, &th.facts);
            let sc = SchemeCtx::new(&g, &th.constraints, true);
            let rules: Vec<CRule> = th.rules.iter().map(|r| CRule::new(&g, r.clone())).collect();
            let refs: Vec<&CRule> = rules.iter().collect();
            let sim = Sim::new(&g, &sc, &refs);
            let interp = Interpreter::new(&th, TraceOptions::default());
            let mut reference = interp.first().ok();
            let mut compiled = sim.first(&g.bits(&th.inits));
            for t in 1..=6 {
                prop_assert_eq!(reference.clone(), compiled.as_ref().map(|b| g.set(b)), "step {}", t);
                let (Some(r), Some(c)) = (&reference, &compiled) else { break };
                reference = interp.step(r, t + 1).ok();
                compiled = sim.step(c);
            }
        }
    }
}
