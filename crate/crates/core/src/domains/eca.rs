//! Elementary cellular automata on a circular array.

use std::collections::BTreeSet;

use super::{hold_out, typed_objects, ApperceptionTask, TaskKind, TemplateRef};
use crate::lang::{Atom, SensorySequence, TypeSignature};

/// Next row. Bit `4l + 2c + r` of the rule byte is the new value for the
/// neighbourhood (left, centre, right).
pub fn eca_next(rule: u8, row: &[bool]) -> Vec<bool> {
    let n = row.len();
    (0..n)
        .map(|i| {
            let l = row[(i + n - 1) % n] as u8;
            let c = row[i] as u8;
            let r = row[(i + 1) % n] as u8;
            rule >> (4 * l + 2 * c + r) & 1 == 1
        })
        .collect()
}

/// `steps` rows starting with `init`.
pub fn eca_rows(rule: u8, init: &[bool], steps: usize) -> Vec<Vec<bool>> {
    let mut rows = vec![init.to_vec()];
    while rows.len() < steps {
        let next = eca_next(rule, rows.last().unwrap());
        rows.push(next);
    }
    rows.truncate(steps);
    rows
}

pub fn cell(i: usize) -> String {
    format!("c{}", i + 1)
}

/// `0`/`1` (or `.`/`#`) string to cells.
pub fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' | '.' => Some(false),
            '1' | '#' => Some(true),
            _ => None,
        })
        .collect()
}

pub fn eca_signature(cells: usize) -> TypeSignature {
    let mut sig = TypeSignature::new();
    let names: Vec<String> = (0..cells).map(cell).collect();
    typed_objects(&mut sig, "cell", &names);
    sig.add_pred("on", &["cell"]).unwrap();
    sig.add_pred("off", &["cell"]).unwrap();
    sig
}

pub fn row_state(row: &[bool]) -> BTreeSet<Atom> {
    row.iter()
        .enumerate()
        .map(|(i, &b)| Atom::unary(if b { "on" } else { "off" }, &cell(i)))
        .collect()
}

/// on/off readings per cell per step. No spatial relation is emitted.
pub fn eca_generate(rule: u8, cells: usize, steps: usize, init: &[bool]) -> SensorySequence {
    assert_eq!(init.len(), cells, "init must have one bit per cell");
    SensorySequence::new(eca_rows(rule, init, steps).iter().map(|r| row_state(r)).collect())
}

/// A task over `steps` generated rows with the held-out part chosen by `kind`.
pub fn eca_task(rule: u8, init: &[bool], steps: usize, kind: TaskKind, seed: u64) -> ApperceptionTask {
    let truth = eca_generate(rule, init.len(), steps, init);
    let hidden = hold_out(&truth, kind, seed);
    ApperceptionTask::from_truth(
        eca_signature(init.len()),
        &truth,
        hidden,
        BTreeSet::new(),
        TemplateRef::Builtin("eca".into()),
        kind,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn show(row: &[bool]) -> String {
        row.iter().map(|&b| if b { '#' } else { '.' }).collect()
    }

    #[test]
    fn rule_110_reproduces_the_published_rows() {
        // Rows as drawn in the rule 110 trajectory figure.
        let expected = [
            ".....#.....",
            "....##.....",
            "...###.....",
            "..##.#.....",
            ".#####.....",
            "##...#.....",
            "##..##....#",
            ".#.###...##",
            "####.#..###",
            "...###.##..",
        ];
        let init = parse_bits(expected[0]).unwrap();
        let rows = eca_rows(110, &init, expected.len());
        let got: Vec<String> = rows.iter().map(|r| show(r)).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn rule_0_clears_after_one_step() {
        let rows = eca_rows(0, &parse_bits("10110").unwrap(), 4);
        assert!(rows[1..].iter().all(|r| r.iter().all(|&b| !b)));
    }

    #[test]
    fn rule_204_keeps_every_cell() {
        let init = parse_bits("1001101").unwrap();
        for pattern in 0..8u8 {
            assert_eq!(204u8 >> pattern & 1, pattern >> 1 & 1);
        }
        assert!(eca_rows(204, &init, 5).iter().all(|r| *r == init));
    }

    #[test]
    fn generated_states_have_one_reading_per_cell() {
        let s = eca_generate(110, 5, 3, &parse_bits("00100").unwrap());
        assert_eq!(s.len(), 3);
        assert!(s.steps.iter().all(|st| st.len() == 5));
        assert!(s.at(1).contains(&Atom::unary("on", "c3")));
    }
}
