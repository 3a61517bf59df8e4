//! Objects moving along the rows of a grid with wrap-around. An eye under
//! each column sees only the lowest object in that column; the positions of
//! the others are held out.

use std::collections::BTreeSet;

use super::{typed_objects, ApperceptionTask, TaskKind, TemplateRef};
use crate::lang::{Atom, LangError, SensorySequence, TypeSignature};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mover {
    /// 0-based row; row 0 is the top.
    pub row: usize,
    pub start: usize,
    pub direction: Direction,
    /// Cells per move.
    pub speed: usize,
    /// Steps between moves.
    pub every: usize,
}

impl Mover {
    pub fn new(row: usize, start: usize, direction: Direction, speed: usize) -> Mover {
        Mover {
            row,
            start,
            direction,
            speed,
            every: 1,
        }
    }

    /// Column at 1-based time `t`.
    pub fn column(&self, t: usize, width: usize) -> usize {
        let moves = (t - 1) / self.every.max(1);
        let shift = (moves * self.speed) % width;
        match self.direction {
            Direction::Right => (self.start + shift) % width,
            Direction::Left => (self.start + width - shift) % width,
        }
    }
}

pub fn grid_cell(col: usize, row: usize) -> String {
    format!("c{}_{}", col + 1, row + 1)
}

pub fn mover_name(i: usize) -> String {
    format!("m{}", i + 1)
}

pub fn occlusion_signature(width: usize, height: usize, movers: usize) -> TypeSignature {
    let mut sig = TypeSignature::new();
    let cells: Vec<String> = (0..height)
        .flat_map(|r| (0..width).map(move |c| grid_cell(c, r)))
        .collect();
    typed_objects(&mut sig, "cell", &cells);
    typed_objects(&mut sig, "mover", &(0..movers).map(mover_name).collect::<Vec<_>>());
    sig.add_pred("in", &["mover", "cell"]).unwrap();
    sig.add_pred("right", &["cell", "cell"]).unwrap();
    sig.add_pred("below", &["cell", "cell"]).unwrap();
    sig
}

/// `right(a, b)`: b is the next cell rightwards, wrapping. `below(a, b)`: a
/// is directly under b.
pub fn grid_facts(width: usize, height: usize) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    for r in 0..height {
        for c in 0..width {
            if width > 1 {
                out.insert(Atom::binary("right", &grid_cell(c, r), &grid_cell((c + 1) % width, r)));
            }
            if r + 1 < height {
                out.insert(Atom::binary("below", &grid_cell(c, r + 1), &grid_cell(c, r)));
            }
        }
    }
    out
}

pub fn occlusion_generate(width: usize, height: usize, movers: &[Mover], steps: usize) -> Result<ApperceptionTask, LangError> {
    let mut rows = BTreeSet::new();
    for m in movers {
        if m.row >= height || m.start >= width || m.speed == 0 {
            return Err(LangError::Invalid(format!("mover {m:?} does not fit a {width}x{height} grid")));
        }
        if !rows.insert(m.row) {
            return Err(LangError::Invalid(format!("two movers share row {}", m.row + 1)));
        }
    }
    let mut truth = Vec::with_capacity(steps);
    let mut hidden = BTreeSet::new();
    for t in 1..=steps {
        let cols: Vec<usize> = movers.iter().map(|m| m.column(t, width)).collect();
        let mut state = BTreeSet::new();
        for (i, m) in movers.iter().enumerate() {
            let atom = Atom::binary("in", &mover_name(i), &grid_cell(cols[i], m.row));
            let occluded = movers
                .iter()
                .enumerate()
                .any(|(j, o)| j != i && cols[j] == cols[i] && o.row > m.row);
            if occluded {
                hidden.insert((t, atom.clone()));
            }
            state.insert(atom);
        }
        truth.push(state);
    }
    Ok(ApperceptionTask::from_truth(
        occlusion_signature(width, height, movers.len()),
        &SensorySequence::new(truth),
        hidden,
        grid_facts(width, height),
        TemplateRef::Builtin("occlusion".into()),
        TaskKind::Imputation,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separate_columns_hide_nothing() {
        let ms = [Mover::new(0, 0, Direction::Right, 1), Mover::new(1, 2, Direction::Right, 1)];
        let task = occlusion_generate(4, 2, &ms, 6).unwrap();
        assert!(task.hidden.is_empty());
        assert_eq!(task.visible.atom_count(), 12);
    }

    #[test]
    fn upper_mover_is_hidden_when_stacked() {
        let ms = [Mover::new(0, 1, Direction::Right, 1), Mover::new(1, 1, Direction::Left, 1)];
        let task = occlusion_generate(5, 2, &ms, 3).unwrap();
        let expected = BTreeSet::from([(1, Atom::binary("in", "m1", "c2_1"))]);
        assert_eq!(task.hidden, expected);
        assert!(task.visible.at(1).contains(&Atom::binary("in", "m2", "c2_2")));
    }

    #[test]
    fn fast_leftward_mover_wraps() {
        let m = Mover::new(0, 0, Direction::Left, 2);
        assert_eq!(m.column(2, 7), 5);
        assert_eq!(m.column(3, 7), 3);
    }

    #[test]
    fn slow_mover_waits() {
        let m = Mover {
            every: 2,
            ..Mover::new(0, 3, Direction::Left, 1)
        };
        let cols: Vec<usize> = (1..=5).map(|t| m.column(t, 4)).collect();
        assert_eq!(cols, [3, 3, 2, 2, 1]);
    }
}
