//! Non-learning reference predictors. Both see only the visible part of a
//! task and predict one reading per sensor per step.
//!
//! A sensor is identified by the first argument of its readings, so `on(c1)`
//! and `off(c1)` are two values of sensor `c1`, and `v(sc, n3)` is a value
//! of sensor `sc`.

use std::collections::{BTreeMap, BTreeSet};

use crate::domains::ApperceptionTask;
use crate::lang::Atom;

/// Predicted state per step, index t-1.
pub type Prediction = Vec<BTreeSet<Atom>>;

pub fn subject(a: &Atom) -> &str {
    a.args.first().map(String::as_str).unwrap_or("")
}

/// Visible readings per sensor as (time, atom) in time order.
fn readings(task: &ApperceptionTask) -> BTreeMap<String, Vec<(usize, Atom)>> {
    let mut out: BTreeMap<String, Vec<(usize, Atom)>> = BTreeMap::new();
    for (i, state) in task.visible.steps.iter().enumerate() {
        for a in state {
            out.entry(subject(a).to_string()).or_default().push((i + 1, a.clone()));
        }
    }
    out
}

/// Every step gets each sensor's most frequent visible reading; ties go to
/// the smallest atom.
pub fn baseline_constant(task: &ApperceptionTask) -> Prediction {
    let mut state = BTreeSet::new();
    for rs in readings(task).values() {
        let mut counts: BTreeMap<&Atom, usize> = BTreeMap::new();
        for (_, a) in rs {
            *counts.entry(a).or_default() += 1;
        }
        let best = counts.iter().max_by(|x, y| x.1.cmp(y.1).then(y.0.cmp(x.0))).map(|(a, _)| (*a).clone());
        state.extend(best);
    }
    vec![state; task.len()]
}

/// Each sensor repeats its nearest earlier visible reading, or failing that
/// its nearest later one. For a prediction task this copies the penultimate
/// state.
pub fn baseline_inertia(task: &ApperceptionTask) -> Prediction {
    let rs = readings(task);
    (1..=task.len())
        .map(|t| {
            rs.values()
                .filter_map(|r| {
                    if r.iter().any(|(u, _)| *u == t) {
                        return r.iter().find(|(u, _)| *u == t).map(|(_, a)| a.clone());
                    }
                    let before = r.iter().rev().find(|(u, _)| *u < t);
                    before.or_else(|| r.iter().find(|(u, _)| *u > t)).map(|(_, a)| a.clone())
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::eca::{eca_task, parse_bits};
    use crate::domains::{hide_steps, TaskKind, TemplateRef};
    use crate::lang::{SensorySequence, TypeSignature};

    fn on_off_task(pattern: &str) -> ApperceptionTask {
        let mut sig = TypeSignature::new();
        sig.add_type("cell").unwrap();
        sig.add_object("a", "cell").unwrap();
        sig.add_pred("on", &["cell"]).unwrap();
        sig.add_pred("off", &["cell"]).unwrap();
        let truth = SensorySequence::new(
            pattern
                .chars()
                .map(|c| BTreeSet::from([Atom::unary(if c == '1' { "on" } else { "off" }, "a")]))
                .collect(),
        );
        let hidden = hide_steps(&truth, &[truth.len()]);
        ApperceptionTask::from_truth(sig, &truth, hidden, BTreeSet::new(), TemplateRef::Auto, TaskKind::Prediction)
    }

    #[test]
    fn inertia_solves_rule_0() {
        let task = eca_task(0, &parse_bits("01101").unwrap(), 6, TaskKind::Prediction, 0);
        let p = baseline_inertia(&task);
        assert!(task.hidden.iter().all(|(t, a)| p[t - 1].contains(a)));
    }

    #[test]
    fn inertia_misses_the_flip() {
        let task = on_off_task("10101");
        let p = baseline_inertia(&task);
        assert!(p[4].contains(&Atom::unary("off", "a")));
        assert!(!p[4].contains(&Atom::unary("on", "a")));
    }

    #[test]
    fn constant_takes_the_majority() {
        // on in 7 of the 10 visible steps.
        let task = on_off_task("11011011010");
        let p = baseline_constant(&task);
        assert_eq!(p[10], BTreeSet::from([Atom::unary("on", "a")]));
    }

    #[test]
    fn constant_breaks_ties_by_atom_order() {
        let task = on_off_task("10101");
        assert_eq!(baseline_constant(&task)[4], BTreeSet::from([Atom::unary("off", "a")]));
    }

    #[test]
    fn retrodiction_looks_forward() {
        let task = eca_task(204, &parse_bits("0110").unwrap(), 4, TaskKind::Retrodiction, 0);
        let p = baseline_inertia(&task);
        assert!(task.hidden.iter().all(|(t, a)| p[t - 1].contains(a)));
    }
}
