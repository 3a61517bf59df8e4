//! Operational semantics: incompossibility, static closure, causal steps and
//! the frame axiom, producing a finite prefix of a theory's trace.
//!
//! This is the reference interpreter. It works directly on atom sets and is
//! used to check every theory the search engine returns.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::lang::{apply_subst, Atom, Constraint, Rule, RuleKind, SensorySequence, Theory, TypeSignature};

pub type State = BTreeSet<Atom>;

/// A₁…A_T, with the first detected recurrence as (start, length), 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TracePrefix {
    pub states: Vec<State>,
    pub period: Option<(usize, usize)>,
}

impl TracePrefix {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// State at 1-based time `t`.
    pub fn at(&self, t: usize) -> &State {
        &self.states[t - 1]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// Two atoms of one state are ruled out together by a constraint.
    Incompossible { a: Atom, b: Atom, constraint: Constraint },
    /// The frame axiom has no consistent resolution: `atom` was dropped but
    /// nothing in the new state excludes it.
    Unstable { atom: Atom },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ConstraintViolation {
    pub time: usize,
    pub kind: ViolationKind,
}

impl fmt::Display for ConstraintViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ViolationKind::Incompossible { a, b, constraint } => {
                write!(f, "step {}: {a} and {b} violate `{constraint}`", self.time)
            }
            ViolationKind::Unstable { atom } => {
                write!(f, "step {}: frame axiom has no stable resolution for {atom}", self.time)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceOptions {
    /// When false no two atoms are ever incompossible (ablation switch).
    pub incompossibility: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { incompossibility: true }
    }
}

/// The constraint that rules out `a` and `b` together, if any.
pub fn precluding<'c>(a: &Atom, b: &Atom, constraints: impl IntoIterator<Item = &'c Constraint>) -> Option<&'c Constraint> {
    if a == b {
        return None;
    }
    constraints.into_iter().find(|c| match c {
        Constraint::XorUnary { preds, .. } | Constraint::XorBinary { preds, .. } => {
            a.args == b.args && a.pred != b.pred && preds.contains(&a.pred) && preds.contains(&b.pred)
        }
        Constraint::ExistsUnique { pred } => {
            a.pred == *pred && b.pred == *pred && a.args[0] == b.args[0] && a.args[1] != b.args[1]
        }
    })
}

pub fn incompossible<'c>(a: &Atom, b: &Atom, constraints: impl IntoIterator<Item = &'c Constraint>) -> bool {
    precluding(a, b, constraints).is_some()
}

/// Ground instances (body, head) of one rule over all bindings of its variables.
pub fn ground_rule(rule: &Rule, sig: &TypeSignature) -> Vec<(Vec<Atom>, Atom)> {
    let vars = rule.variables();
    sig.substitutions_over(vars.iter())
        .iter()
        .map(|s| {
            let body = rule
                .body
                .iter()
                .map(|a| apply_subst(a, s).expect("rule variables are bound"))
                .collect();
            (body, apply_subst(&rule.head, s).expect("rule variables are bound"))
        })
        .collect()
}

fn fire(instances: &[(Vec<Atom>, Atom)], state: &State) -> BTreeSet<Atom> {
    instances
        .iter()
        .filter(|(body, _)| body.iter().all(|a| state.contains(a)))
        .map(|(_, h)| h.clone())
        .collect()
}

fn closure(mut state: State, instances: &[(Vec<Atom>, Atom)], bound: usize) -> State {
    for _ in 0..=bound {
        let new: Vec<Atom> = fire(instances, &state).into_iter().filter(|h| !state.contains(h)).collect();
        if new.is_empty() {
            return state;
        }
        state.extend(new);
    }
    panic!("static closure exceeded its iteration bound");
}

/// Least superset of `state` closed under the static rules in `rules`.
pub fn static_closure<'r>(state: &State, rules: impl IntoIterator<Item = &'r Rule>, sig: &TypeSignature) -> State {
    let inst: Vec<_> = rules
        .into_iter()
        .filter(|r| r.kind == RuleKind::Static)
        .flat_map(|r| ground_rule(r, sig))
        .collect();
    closure(state.clone(), &inst, sig.ground_atoms().len() + 1)
}

/// Heads of causal ground instances whose bodies hold in `state`.
pub fn causal_consequences<'r>(
    state: &State,
    rules: impl IntoIterator<Item = &'r Rule>,
    sig: &TypeSignature,
) -> BTreeSet<Atom> {
    let inst: Vec<_> = rules
        .into_iter()
        .filter(|r| r.kind == RuleKind::Causal)
        .flat_map(|r| ground_rule(r, sig))
        .collect();
    fire(&inst, state)
}

/// A theory prepared for repeated stepping.
pub struct Interpreter<'t> {
    theory: &'t Theory,
    statics: Vec<(Vec<Atom>, Atom)>,
    causals: Vec<(Vec<Atom>, Atom)>,
    constraints: Vec<Constraint>,
    bound: usize,
}

impl<'t> Interpreter<'t> {
    pub fn new(theory: &'t Theory, options: TraceOptions) -> Self {
        let sig = &theory.signature;
        let mut statics = Vec::new();
        let mut causals = Vec::new();
        for r in &theory.rules {
            let inst = ground_rule(r, sig);
            match r.kind {
                RuleKind::Static => statics.extend(inst),
                RuleKind::Causal => causals.extend(inst),
            }
        }
        let constraints = if options.incompossibility {
            theory.constraints.iter().cloned().collect()
        } else {
            Vec::new()
        };
        Interpreter {
            theory,
            statics,
            causals,
            constraints,
            bound: sig.ground_atoms().len() + theory.facts.len() + 1,
        }
    }

    fn clash(&self, a: &Atom, b: &Atom) -> bool {
        incompossible(a, b, &self.constraints)
    }

    fn check_consistent(&self, state: &State, time: usize) -> Result<(), ConstraintViolation> {
        for a in state {
            for b in state.range(a..).skip(1) {
                if let Some(c) = precluding(a, b, &self.constraints) {
                    return Err(ConstraintViolation {
                        time,
                        kind: ViolationKind::Incompossible {
                            a: a.clone(),
                            b: b.clone(),
                            constraint: c.clone(),
                        },
                    });
                }
            }
        }
        Ok(())
    }

    /// A₁: the initial atoms and background facts closed under static rules.
    pub fn first(&self) -> Result<State, ConstraintViolation> {
        let seed: State = self.theory.inits.iter().chain(&self.theory.facts).cloned().collect();
        let a1 = closure(seed, &self.statics, self.bound);
        self.check_consistent(&a1, 1)?;
        Ok(a1)
    }

    /// The state following `prev`, which is the state at time `t - 1`.
    pub fn step(&self, prev: &State, t: usize) -> Result<State, ConstraintViolation> {
        let mut seed = fire(&self.causals, prev);
        seed.extend(self.theory.facts.iter().cloned());
        let derived = closure(seed, &self.statics, self.bound);
        self.check_consistent(&derived, t)?;

        let mut frame: State = prev
            .iter()
            .filter(|a| !self.theory.facts.contains(*a))
            .filter(|a| !derived.iter().any(|b| self.clash(a, b)))
            .cloned()
            .collect();
        let mut rounds = 0;
        let next = loop {
            rounds += 1;
            assert!(rounds <= self.bound + 1, "frame resolution exceeded its iteration bound");
            let mut seed = derived.clone();
            seed.extend(frame.iter().cloned());
            let x = closure(seed, &self.statics, self.bound);
            let drop: Vec<Atom> = frame
                .iter()
                .filter(|a| x.iter().any(|b| !frame.contains(b) && self.clash(a, b)))
                .cloned()
                .collect();
            if drop.is_empty() {
                break x;
            }
            for a in drop {
                frame.remove(&a);
            }
        };
        self.check_consistent(&next, t)?;
        for a in prev {
            if !next.contains(a) && !next.iter().any(|b| self.clash(a, b)) {
                return Err(ConstraintViolation {
                    time: t,
                    kind: ViolationKind::Unstable { atom: a.clone() },
                });
            }
        }
        Ok(next)
    }

    pub fn trace(&self, horizon: usize) -> Result<TracePrefix, ConstraintViolation> {
        assert!(horizon >= 1, "trace horizon must be at least 1");
        let mut states: Vec<State> = vec![self.first()?];
        let mut seen: HashMap<State, usize> = HashMap::new();
        seen.insert(states[0].clone(), 1);
        let mut period = None;
        while states.len() < horizon {
            let t = states.len() + 1;
            if let Some((s, l)) = period {
                // Deterministic transitions: the cycle simply repeats.
                let idx: usize = s + (t - s) % l;
                states.push(states[idx - 1].clone());
                continue;
            }
            let next = self.step(states.last().unwrap(), t)?;
            if let Some(&s) = seen.get(&next) {
                period = Some((s, t - s));
            } else {
                seen.insert(next.clone(), t);
            }
            states.push(next);
        }
        Ok(TracePrefix { states, period })
    }
}

/// One transition of `theory` from `prev`; `t` is the time of the new state.
pub fn step(prev: &State, theory: &Theory, t: usize) -> Result<State, ConstraintViolation> {
    Interpreter::new(theory, TraceOptions::default()).step(prev, t)
}

pub fn trace(theory: &Theory, horizon: usize) -> Result<TracePrefix, ConstraintViolation> {
    trace_with(theory, horizon, TraceOptions::default())
}

pub fn trace_with(theory: &Theory, horizon: usize, options: TraceOptions) -> Result<TracePrefix, ConstraintViolation> {
    Interpreter::new(theory, options).trace(horizon)
}

/// True iff every S_i is a subset of A_i.
pub fn covers(trace: &TracePrefix, seq: &SensorySequence) -> bool {
    assert!(trace.len() >= seq.len(), "trace shorter than the sequence");
    seq.steps.iter().zip(&trace.states).all(|(s, a)| s.is_subset(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_theory;

    fn state(atoms: &[&str]) -> State {
        atoms.iter().map(|a| crate::lang::parse_atom(a).unwrap()).collect()
    }

    #[test]
    fn incompossibility_examples() {
        let th = parse_theory("type s\nobject a s\nobject b s\nobject c s\npred on(s)\npred off(s)\npred r(s,s)\nxor on off\nunique r\n").unwrap();
        let cs = &th.constraints;
        assert!(incompossible(&Atom::unary("on", "a"), &Atom::unary("off", "a"), cs));
        assert!(!incompossible(&Atom::unary("on", "a"), &Atom::unary("on", "b"), cs));
        assert!(!incompossible(&Atom::unary("on", "a"), &Atom::unary("off", "b"), cs));
        assert!(incompossible(&Atom::binary("r", "a", "b"), &Atom::binary("r", "a", "c"), cs));
        assert!(!incompossible(&Atom::binary("r", "a", "b"), &Atom::binary("r", "c", "b"), cs));
    }

    #[test]
    fn closure_examples() {
        let th = parse_theory(
            "type s\nobject a s\npred p(s)\npred q(s)\npred r(s)\nvar x s\nrule p(x) -> q(x)\nrule q(x) -> r(x)\n",
        )
        .unwrap();
        let got = static_closure(&state(&["p(a)"]), &th.rules, &th.signature);
        assert_eq!(got, state(&["p(a)", "q(a)", "r(a)"]));
        let none = static_closure(&state(&["q(a)"]), std::iter::empty(), &th.signature);
        assert_eq!(none, state(&["q(a)"]));
    }

    #[test]
    fn causal_examples() {
        let th = parse_theory(
            "type c\nobject a c\nobject b c\npred on(c)\npred off(c)\npred r(c,c)\nvar x c\nvar y c\n\
             rule r(x,y), on(x), off(y) >> on(y)\n",
        )
        .unwrap();
        let got = causal_consequences(&state(&["r(a,b)", "on(a)", "off(b)"]), &th.rules, &th.signature);
        assert_eq!(got, state(&["on(b)"]));
        assert!(causal_consequences(&State::new(), &th.rules, &th.signature).is_empty());
    }

    #[test]
    fn frame_persists_without_rules() {
        let th = parse_theory("type s\nobject a s\npred p(s)\npred q(s)\ninit p(a)\nxor p q\n").unwrap();
        let a1 = state(&["p(a)"]);
        assert_eq!(step(&a1, &th, 2).unwrap(), a1);
    }

    #[test]
    fn conflicting_derivations_are_violations() {
        let th = parse_theory(
            "type s\nobject a s\npred on(s)\npred off(s)\npred p(s)\npred q(s)\nvar x s\n\
             init p(a)\ninit on(a)\nrule p(x) >> q(x)\nrule q(x) -> on(x)\nrule q(x) -> off(x)\nxor on off\nxor p q\n",
        )
        .unwrap();
        let err = trace(&th, 3).unwrap_err();
        assert_eq!(err.time, 2);
        assert!(matches!(err.kind, ViolationKind::Incompossible { .. }));
    }

    #[test]
    fn empty_theory_has_empty_states() {
        let th = parse_theory("type s\nobject a s\npred on(s)\npred off(s)\n").unwrap();
        let tr = trace(&th, 3).unwrap();
        assert!(tr.states.iter().all(|s| s.is_empty()));
        assert_eq!(tr.period, Some((1, 1)));
    }
}
