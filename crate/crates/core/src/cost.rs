//! Theory length and the noise-tolerant cost.

use std::collections::BTreeSet;

use crate::lang::{Atom, RuleKind, SensorySequence, Theory};
use crate::trace::{trace, ConstraintViolation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CostBreakdown {
    pub n_inits: usize,
    pub n_static: usize,
    pub n_causal: usize,
    pub n_body_atoms: usize,
    pub total: usize,
    pub noise_discrepancies: Option<usize>,
}

impl CostBreakdown {
    /// The "complexity" figure used in published tables: each causal rule
    /// counts once more than in `total`.
    pub fn table_complexity(&self) -> usize {
        self.total + self.n_causal
    }

    /// `total` plus `beta` per unexplained sensory atom.
    pub fn noise_total(&self, beta: usize) -> usize {
        self.total + beta * self.noise_discrepancies.unwrap_or(0)
    }

    pub const CSV_HEADER: &'static str = "inits,static,causal,body,total,table_complexity,noise";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.n_inits,
            self.n_static,
            self.n_causal,
            self.n_body_atoms,
            self.total,
            self.table_complexity(),
            self.noise_discrepancies.map(|d| d.to_string()).unwrap_or_default()
        )
    }
}

/// |I| + Σ (1 + |body|); constraints and background facts are free.
pub fn cost(theory: &Theory) -> CostBreakdown {
    let n_static = theory.rules.iter().filter(|r| r.kind == RuleKind::Static).count();
    let n_causal = theory.rules.len() - n_static;
    let n_body_atoms: usize = theory.rules.iter().map(|r| r.body.len()).sum();
    let n_inits = theory.inits.len();
    CostBreakdown {
        n_inits,
        n_static,
        n_causal,
        n_body_atoms,
        total: n_inits + n_static + n_causal + n_body_atoms,
        noise_discrepancies: None,
    }
}

/// |S_i \ A_i|: sensory atoms the trace does not reproduce.
pub fn discrepancy(sensed: &BTreeSet<Atom>, traced: &BTreeSet<Atom>) -> usize {
    sensed.difference(traced).count()
}

/// Cost plus total discrepancy over the sequence. A theory whose trace
/// violates its constraints has infinite cost, reported as the error.
pub fn cost_noise(theory: &Theory, seq: &SensorySequence) -> Result<CostBreakdown, ConstraintViolation> {
    let tr = trace(theory, seq.len().max(1))?;
    let d = seq.steps.iter().zip(&tr.states).map(|(s, a)| discrepancy(s, a)).sum();
    let mut c = cost(theory);
    c.noise_discrepancies = Some(d);
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{parse_atom, parse_theory};

    #[test]
    fn empty_theory_costs_nothing() {
        let th = parse_theory("type s\nobject a s\npred p(s)\n").unwrap();
        assert_eq!(cost(&th).total, 0);
    }

    #[test]
    fn discrepancy_examples() {
        let s: BTreeSet<Atom> = [parse_atom("q(a)").unwrap()].into_iter().collect();
        let a: BTreeSet<Atom> = [parse_atom("p(a)").unwrap()].into_iter().collect();
        assert_eq!(discrepancy(&s, &a), 1);
        assert_eq!(discrepancy(&a, &a), 0);
        let three: BTreeSet<Atom> = ["p(a)", "p(b)", "q(a)"].iter().map(|x| parse_atom(x).unwrap()).collect();
        assert_eq!(discrepancy(&three, &BTreeSet::new()), 3);
    }

    #[test]
    fn csv_row_has_seven_columns() {
        let c = CostBreakdown {
            n_inits: 22,
            n_static: 0,
            n_causal: 4,
            n_body_atoms: 10,
            total: 36,
            noise_discrepancies: None,
        };
        assert_eq!(c.table_complexity(), 40);
        assert_eq!(c.csv_row(), "22,0,4,10,36,40,");
    }
}
