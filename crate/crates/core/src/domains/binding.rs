//! Multi-modal ECA: a light sensor per cell reads black or white, and touch
//! sensors on chosen cells read 3 while their cell is on, then decay.

use std::collections::BTreeSet;

use super::eca::eca_rows;
use super::rhythm::MAX_LOUDNESS;
use super::{hold_out, typed_objects, ApperceptionTask, TaskKind, TemplateRef};
use crate::lang::{Atom, LangError, SensorySequence, TypeSignature};

pub fn light(i: usize) -> String {
    format!("l{}", i + 1)
}

pub fn touch(i: usize) -> String {
    format!("t{}", i + 1)
}

pub fn int(n: usize) -> String {
    format!("n{n}")
}

pub fn binding_signature(cells: usize, touches: usize) -> TypeSignature {
    let mut sig = TypeSignature::new();
    // The cells are latent, but the template cannot know how many there are.
    typed_objects(&mut sig, "cell", &(0..cells).map(super::eca::cell).collect::<Vec<_>>());
    typed_objects(&mut sig, "light", &(0..cells).map(light).collect::<Vec<_>>());
    typed_objects(&mut sig, "touch", &(0..touches).map(touch).collect::<Vec<_>>());
    typed_objects(&mut sig, "int", &(0..=MAX_LOUDNESS).map(int).collect::<Vec<_>>());
    sig.add_pred("black", &["light"]).unwrap();
    sig.add_pred("white", &["light"]).unwrap();
    sig.add_pred("value", &["touch", "int"]).unwrap();
    sig.add_pred("succ", &["int", "int"]).unwrap();
    sig.add_pred("max", &["int"]).unwrap();
    sig.add_pred("min", &["int"]).unwrap();
    sig
}

/// Successor, maximum and minimum on touch levels.
pub fn binding_background() -> BTreeSet<Atom> {
    let mut out: BTreeSet<Atom> = (0..MAX_LOUDNESS)
        .map(|i| Atom::binary("succ", &int(i), &int(i + 1)))
        .collect();
    out.insert(Atom::unary("max", &int(MAX_LOUDNESS)));
    out.insert(Atom::unary("min", &int(0)));
    out
}

/// Touch readings per step for sensors on the given 0-based cells.
pub fn touch_levels(rows: &[Vec<bool>], positions: &[usize]) -> Vec<Vec<usize>> {
    let mut cur = vec![0usize; positions.len()];
    rows.iter()
        .map(|row| {
            for (k, &p) in positions.iter().enumerate() {
                cur[k] = if row[p] { MAX_LOUDNESS } else { cur[k].saturating_sub(1) };
            }
            cur.clone()
        })
        .collect()
}

pub fn binding_generate(
    rule: u8,
    init: &[bool],
    touch_positions: &[usize],
    steps: usize,
    kind: TaskKind,
    seed: u64,
) -> Result<ApperceptionTask, LangError> {
    let cells = init.len();
    if let Some(&p) = touch_positions.iter().find(|&&p| p >= cells) {
        return Err(LangError::Invalid(format!("touch position {} outside 1..{cells}", p + 1)));
    }
    let rows = eca_rows(rule, init, steps);
    let touches = touch_levels(&rows, touch_positions);
    let truth = SensorySequence::new(
        rows.iter()
            .zip(&touches)
            .map(|(row, tv)| {
                let mut s: BTreeSet<Atom> = row
                    .iter()
                    .enumerate()
                    .map(|(i, &b)| Atom::unary(if b { "black" } else { "white" }, &light(i)))
                    .collect();
                for (k, &v) in tv.iter().enumerate() {
                    s.insert(Atom::binary("value", &touch(k), &int(v)));
                }
                s
            })
            .collect(),
    );
    let hidden = hold_out(&truth, kind, seed);
    Ok(ApperceptionTask::from_truth(
        binding_signature(cells, touch_positions.len()),
        &truth,
        hidden,
        binding_background(),
        TemplateRef::Builtin("binding".into()),
        kind,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::eca::parse_bits;

    fn published() -> ApperceptionTask {
        let init = parse_bits("00000100000").unwrap();
        binding_generate(110, &init, &[2, 10], 11, TaskKind::Prediction, 0).unwrap()
    }

    fn reading(seq: &SensorySequence, t: usize, sensor: &str) -> String {
        seq.at(t)
            .iter()
            .find(|a| a.args[0] == sensor)
            .map(|a| if a.arity() == 2 { a.args[1].clone() } else { a.pred.clone() })
            .unwrap()
    }

    #[test]
    fn touch_columns_match_the_figure() {
        let truth = published().truth();
        let t1: Vec<String> = (1..=10).map(|t| reading(&truth, t, "t1")).collect();
        let t2: Vec<String> = (1..=10).map(|t| reading(&truth, t, "t2")).collect();
        assert_eq!(t1, ["n0", "n0", "n0", "n3", "n3", "n2", "n1", "n0", "n3", "n2"]);
        assert_eq!(t2, ["n0", "n0", "n0", "n0", "n0", "n0", "n3", "n3", "n3", "n2"]);
    }

    #[test]
    fn light_six_follows_cell_six() {
        let truth = published().truth();
        for t in 1..=10 {
            assert_eq!(reading(&truth, t, "l6"), "black");
        }
        assert_eq!(reading(&truth, 1, "l5"), "white");
    }

    #[test]
    fn touch_on_a_dead_cell_stays_zero() {
        let init = parse_bits("0100").unwrap();
        let task = binding_generate(0, &init, &[3], 5, TaskKind::Prediction, 0).unwrap();
        let truth = task.truth();
        assert!((1..=5).all(|t| reading(&truth, t, "t1") == "n0"));
    }

    #[test]
    fn bad_touch_position_is_rejected() {
        assert!(binding_generate(110, &[true, false], &[2], 3, TaskKind::Prediction, 0).is_err());
    }
}
