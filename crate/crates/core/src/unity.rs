//! The four unity conditions (spatial, conceptual, static, temporal) and the
//! combined "makes sense of" check.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::lang::{Atom, Constraint, Rule, SensorySequence, Theory, TypeSignature};
use crate::trace::{covers, ground_rule, ConstraintViolation, TraceOptions, TracePrefix};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpatialFailure {
    pub time: usize,
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptualFailure {
    pub pred: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StaticFailure {
    /// `subject` holds `count` of the constraint's atoms instead of exactly one.
    Totality {
        time: usize,
        constraint: Constraint,
        subject: Vec<String>,
        count: usize,
    },
    /// The trace itself could not be computed.
    Violation(ConstraintViolation),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TemporalFailure {
    pub time: usize,
    pub rule: Rule,
    pub head: Atom,
}

/// Which conditions to enforce; all on by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnityOptions {
    pub spatial: bool,
    pub conceptual: bool,
    pub static_: bool,
    pub temporal: bool,
}

impl Default for UnityOptions {
    fn default() -> Self {
        UnityOptions {
            spatial: true,
            conceptual: true,
            static_: true,
            temporal: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnityReport {
    pub spatial: Result<(), SpatialFailure>,
    pub conceptual: Result<(), ConceptualFailure>,
    pub static_: Result<(), StaticFailure>,
    pub temporal: Result<(), TemporalFailure>,
    pub covers: bool,
}

impl UnityReport {
    pub fn unified(&self) -> bool {
        self.spatial.is_ok() && self.conceptual.is_ok() && self.static_.is_ok() && self.temporal.is_ok()
    }

    /// Unified and covering: the theory makes sense of the sequence.
    pub fn accepted(&self) -> bool {
        self.unified() && self.covers
    }
}

impl fmt::Display for UnityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.spatial {
            Ok(()) => writeln!(f, "spatial: pass")?,
            Err(e) => writeln!(f, "spatial: fail at step {}: {} and {} are not connected", e.time, e.a, e.b)?,
        }
        match &self.conceptual {
            Ok(()) => writeln!(f, "conceptual: pass")?,
            Err(e) => writeln!(f, "conceptual: fail: `{}` is not covered by any constraint", e.pred)?,
        }
        match &self.static_ {
            Ok(()) => writeln!(f, "static: pass")?,
            Err(StaticFailure::Totality {
                time,
                constraint,
                subject,
                count,
            }) => writeln!(
                f,
                "static: fail at step {time}: ({}) has {count} atoms of `{constraint}`",
                subject.join(",")
            )?,
            Err(StaticFailure::Violation(v)) => writeln!(f, "static: fail: {v}")?,
        }
        match &self.temporal {
            Ok(()) => writeln!(f, "temporal: pass")?,
            Err(e) => writeln!(f, "temporal: fail at step {}: `{}` fires but {} is missing next", e.time, e.rule, e.head)?,
        }
        writeln!(
            f,
            "unified: {}, covers: {}",
            if self.unified() { "yes" } else { "no" },
            if self.covers { "yes" } else { "no" }
        )
    }
}

/// Orders names so that embedded numbers compare numerically (c2 < c10).
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn split(s: &str) -> (&str, Option<u64>) {
        let cut = s.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        (&s[..cut], s[cut..].parse().ok())
    }
    let (pa, na) = split(a);
    let (pb, nb) = split(b);
    pa.cmp(pb).then(na.cmp(&nb)).then(a.cmp(b))
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Every state's binary atoms must connect all declared objects.
pub fn check_spatial(trace: &TracePrefix, sig: &TypeSignature) -> Result<(), SpatialFailure> {
    let mut objects: Vec<&str> = sig.objects.keys().map(String::as_str).collect();
    objects.sort_by(|a, b| natural_cmp(a, b));
    if objects.len() <= 1 {
        return Ok(());
    }
    let index: BTreeMap<&str, usize> = objects.iter().enumerate().map(|(i, o)| (*o, i)).collect();
    for (i, state) in trace.states.iter().enumerate() {
        let mut parent: Vec<usize> = (0..objects.len()).collect();
        for a in state.iter().filter(|a| a.arity() == 2) {
            if let (Some(&x), Some(&y)) = (index.get(a.args[0].as_str()), index.get(a.args[1].as_str())) {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
                parent[rx] = ry;
            }
        }
        let root = find(&mut parent, 0);
        for j in 1..objects.len() {
            if find(&mut parent, j) != root {
                return Err(SpatialFailure {
                    time: i + 1,
                    a: objects[0].to_string(),
                    b: objects[j].to_string(),
                });
            }
        }
    }
    Ok(())
}

/// Every predicate outside `exempt` must occur in some constraint of the
/// right shape.
pub fn check_conceptual_except(
    sig: &TypeSignature,
    constraints: &BTreeSet<Constraint>,
    exempt: &BTreeSet<String>,
) -> Result<(), ConceptualFailure> {
    for (p, tys) in &sig.predicates {
        if exempt.contains(p) {
            continue;
        }
        let covered = constraints.iter().any(|c| match c {
            Constraint::XorUnary { preds, .. } => tys.len() == 1 && preds.contains(p),
            Constraint::XorBinary { preds, .. } => tys.len() == 2 && preds.contains(p),
            Constraint::ExistsUnique { pred } => tys.len() == 2 && pred == p,
        });
        if !covered {
            return Err(ConceptualFailure { pred: p.clone() });
        }
    }
    Ok(())
}

pub fn check_conceptual(sig: &TypeSignature, constraints: &BTreeSet<Constraint>) -> Result<(), ConceptualFailure> {
    check_conceptual_except(sig, constraints, &BTreeSet::new())
}

/// Each state must contain exactly one atom per constraint subject.
pub fn check_static(
    trace: &TracePrefix,
    constraints: &BTreeSet<Constraint>,
    sig: &TypeSignature,
) -> Result<(), StaticFailure> {
    for (i, state) in trace.states.iter().enumerate() {
        for c in constraints {
            let slots: Vec<(Vec<String>, Vec<Atom>)> = match c {
                Constraint::XorUnary { ty, preds } => sig
                    .objects_of(ty)
                    .into_iter()
                    .map(|x| (vec![x.to_string()], preds.iter().map(|p| Atom::unary(p, x)).collect()))
                    .collect(),
                Constraint::XorBinary { ty1, ty2, preds } => {
                    let mut v = Vec::new();
                    for x in sig.objects_of(ty1) {
                        for y in sig.objects_of(ty2) {
                            v.push((
                                vec![x.to_string(), y.to_string()],
                                preds.iter().map(|p| Atom::binary(p, x, y)).collect(),
                            ));
                        }
                    }
                    v
                }
                Constraint::ExistsUnique { pred } => {
                    let tys = sig.arg_types(pred).expect("validated constraint");
                    let ys = sig.objects_of(&tys[1]);
                    sig.objects_of(&tys[0])
                        .into_iter()
                        .map(|x| (vec![x.to_string()], ys.iter().map(|y| Atom::binary(pred, x, y)).collect()))
                        .collect()
                }
            };
            for (subject, atoms) in slots {
                let count = atoms.iter().filter(|a| state.contains(*a)).count();
                if count != 1 {
                    return Err(StaticFailure::Totality {
                        time: i + 1,
                        constraint: c.clone(),
                        subject,
                        count,
                    });
                }
            }
        }
    }
    Ok(())
}

/// Every fired causal ground instance must have its head in the next state.
pub fn check_temporal(theory: &Theory, trace: &TracePrefix) -> Result<(), TemporalFailure> {
    for rule in theory.causal_rules() {
        let inst = ground_rule(rule, &theory.signature);
        for t in 1..trace.len() {
            let (now, next) = (trace.at(t), trace.at(t + 1));
            for (body, head) in &inst {
                if body.iter().all(|a| now.contains(a)) && !next.contains(head) {
                    return Err(TemporalFailure {
                        time: t,
                        rule: rule.clone(),
                        head: head.clone(),
                    });
                }
            }
        }
    }
    Ok(())
}

/// Traces the theory over the sequence's length and evaluates everything.
pub fn unified(theory: &Theory, seq: &SensorySequence) -> UnityReport {
    unified_with(theory, seq, UnityOptions::default(), TraceOptions::default())
}

pub fn unified_with(
    theory: &Theory,
    seq: &SensorySequence,
    options: UnityOptions,
    trace_options: TraceOptions,
) -> UnityReport {
    let given = theory.given_preds();
    let conceptual = if options.conceptual {
        check_conceptual_except(&theory.signature, &theory.constraints, &given)
    } else {
        Ok(())
    };
    let tr = match crate::trace::trace_with(theory, seq.len().max(1), trace_options) {
        Ok(tr) => tr,
        Err(v) => {
            return UnityReport {
                spatial: Ok(()),
                conceptual,
                static_: Err(StaticFailure::Violation(v)),
                temporal: Ok(()),
                covers: false,
            }
        }
    };
    let spatial = if options.spatial {
        check_spatial(&tr, &theory.signature)
    } else {
        Ok(())
    };
    let static_ = if options.static_ {
        check_static(&tr, &theory.constraints, &theory.signature)
    } else {
        Ok(())
    };
    let temporal = if options.temporal {
        check_temporal(theory, &tr)
    } else {
        Ok(())
    };
    UnityReport {
        spatial,
        conceptual,
        static_,
        temporal,
        covers: covers(&tr, seq),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_theory;
    use crate::trace::State;

    fn state(atoms: &[&str]) -> State {
        atoms.iter().map(|a| crate::lang::parse_atom(a).unwrap()).collect()
    }

    fn prefix(states: Vec<State>) -> TracePrefix {
        TracePrefix { states, period: None }
    }

    #[test]
    fn spatial_clusters_are_reported() {
        let mut text = String::from("type cell\npred r(cell,cell)\n");
        for i in 1..=11 {
            text.push_str(&format!("object c{i} cell\n"));
        }
        let th = parse_theory(&text).unwrap();
        let mut atoms = Vec::new();
        for i in 1..5 {
            atoms.push(format!("r(c{},c{})", i, i + 1));
        }
        for i in 6..11 {
            atoms.push(format!("r(c{},c{})", i, i + 1));
        }
        let refs: Vec<&str> = atoms.iter().map(String::as_str).collect();
        let err = check_spatial(&prefix(vec![state(&refs)]), &th.signature).unwrap_err();
        assert_eq!((err.time, err.a.as_str(), err.b.as_str()), (1, "c1", "c6"));
    }

    #[test]
    fn single_object_is_connected() {
        let th = parse_theory("type s\nobject a s\npred on(s)\n").unwrap();
        assert!(check_spatial(&prefix(vec![State::new()]), &th.signature).is_ok());
    }

    #[test]
    fn conceptual_needs_every_predicate() {
        let th = parse_theory("type s\nobject a s\npred on(s)\npred off(s)\npred r(s,s)\nunique r\n").unwrap();
        let err = check_conceptual(&th.signature, &th.constraints).unwrap_err();
        assert_eq!(err.pred, "off");
        let ok = parse_theory("type s\nobject a s\npred on(s)\npred off(s)\npred r(s,s)\nunique r\nxor on off\n").unwrap();
        assert!(check_conceptual(&ok.signature, &ok.constraints).is_ok());
    }

    #[test]
    fn static_totality_and_uniqueness() {
        let th = parse_theory("type s\nobject a s\nobject b s\nobject c s\npred on(s)\npred off(s)\npred r(s,s)\nxor on off\n").unwrap();
        let err = check_static(&prefix(vec![state(&["on(a)", "off(c)"])]), &th.constraints, &th.signature).unwrap_err();
        assert!(matches!(err, StaticFailure::Totality { ref subject, count: 0, .. } if subject == &["b"]));

        let th = parse_theory("type s\nobject a s\nobject b s\nobject c s\npred r(s,s)\nunique r\n").unwrap();
        let err = check_static(
            &prefix(vec![state(&["r(a,b)", "r(a,c)", "r(b,a)", "r(c,a)"])]),
            &th.constraints,
            &th.signature,
        )
        .unwrap_err();
        assert!(matches!(err, StaticFailure::Totality { count: 2, .. }));
    }

    #[test]
    fn temporal_detects_missing_heads() {
        let th = parse_theory("type s\nobject a s\npred p(s)\npred q(s)\nvar x s\nrule p(x) >> q(x)\nxor p q\n").unwrap();
        let good = prefix(vec![state(&["p(a)"]), state(&["q(a)"])]);
        assert!(check_temporal(&th, &good).is_ok());
        let bad = prefix(vec![state(&["p(a)"]), state(&["p(a)"])]);
        let err = check_temporal(&th, &bad).unwrap_err();
        assert_eq!(err.time, 1);
        assert_eq!(err.head, Atom::unary("q", "a"));
    }

    #[test]
    fn natural_order() {
        let mut v = vec!["c10", "c2", "c1", "b"];
        v.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(v, ["b", "c1", "c2", "c10"]);
    }
}
