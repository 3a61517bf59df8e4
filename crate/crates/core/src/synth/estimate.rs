//! Closed-form size of the ground program a clause-level encoding of a
//! template would produce. Counts are exact for the given signature.

use std::collections::BTreeMap;
use std::fmt;

use crate::lang::{Template, TypeSignature};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundingEstimate {
    pub n_subst: u128,
    pub n_unground: u128,
    pub n_ground: u128,
    pub n_rules: u128,
    pub steps: u128,
    /// |Σ|·|U|·(N→+N⇒)·t + |G|·(t+1)
    pub holds: u128,
    /// |Σ|·|U|·t
    pub eval_atom: u128,
    /// |Σ|·(N→+N⇒)·t
    pub eval_body: u128,
    /// 5·|Σ|·(N→+N⇒)·|U|·t
    pub total: u128,
    /// Ground and unground atoms per predicate.
    pub per_predicate: BTreeMap<String, (u128, u128)>,
}

fn count(sig: &TypeSignature, ty: &str, vars: bool) -> u128 {
    if vars {
        sig.vars_of(ty).len() as u128
    } else {
        sig.objects_of(ty).len() as u128
    }
}

pub fn grounding_estimate(template: &Template, steps: u64) -> GroundingEstimate {
    let sig = &template.signature;
    let mut per_predicate = BTreeMap::new();
    for (p, tys) in &sig.predicates {
        let g: u128 = tys.iter().map(|t| count(sig, t, false)).product();
        let u: u128 = tys.iter().map(|t| count(sig, t, true)).product();
        per_predicate.insert(p.clone(), (g, u));
    }
    let n_ground: u128 = per_predicate.values().map(|v| v.0).sum();
    let n_unground: u128 = per_predicate.values().map(|v| v.1).sum();
    let n_subst: u128 = sig.variables.values().map(|t| count(sig, t, false)).product();
    let n_rules = (template.n_static + template.n_causal) as u128;
    let t = steps as u128;
    GroundingEstimate {
        n_subst,
        n_unground,
        n_ground,
        n_rules,
        steps: t,
        holds: n_subst * n_unground * n_rules * t + n_ground * (t + 1),
        eval_atom: n_subst * n_unground * t,
        eval_body: n_subst * n_rules * t,
        total: 5 * n_subst * n_rules * n_unground * t,
        per_predicate,
    }
}

impl fmt::Display for GroundingEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "substitutions {}", self.n_subst)?;
        writeln!(f, "unground_atoms {}", self.n_unground)?;
        writeln!(f, "ground_atoms {}", self.n_ground)?;
        writeln!(f, "rules {}", self.n_rules)?;
        writeln!(f, "steps {}", self.steps)?;
        for (p, (g, u)) in &self.per_predicate {
            writeln!(f, "pred {p} ground {g} unground {u}")?;
        }
        writeln!(f, "holds {}", self.holds)?;
        writeln!(f, "eval_atom {}", self.eval_atom)?;
        writeln!(f, "eval_body {}", self.eval_body)?;
        writeln!(f, "total {}", self.total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn no_rules_means_no_rule_rows() {
        let mut sig = TypeSignature::new();
        sig.add_type("c").unwrap();
        sig.add_object("a", "c").unwrap();
        sig.add_pred("on", &["c"]).unwrap();
        sig.add_var("x", "c").unwrap();
        let t = Template {
            signature: sig,
            n_static: 0,
            n_causal: 0,
            n_body: 1,
        };
        let e = grounding_estimate(&t, 10);
        assert_eq!((e.eval_body, e.total), (0, 0));
        assert_eq!(e.holds, 11);
        assert_eq!(e.eval_atom, 10);
    }
}
