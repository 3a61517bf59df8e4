//! The hypothesis space of one template: constraint schemes, candidate rules
//! and the two symmetry breakers.

use std::collections::{BTreeMap, BTreeSet};

use crate::lang::{Atom, Constraint, Rule, RuleKind, Template, TypeSignature};

/// Switches for the pruning that shapes the space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpaceOptions {
    pub symmetry_breaking: bool,
    pub redundancy_pruning: bool,
    /// Allow schemes that leave predicates unconstrained.
    pub partial_schemes: bool,
    /// Also exclude causal rules whose head is incompossible with a body
    /// atom. This is not a redundant constraint: it removes theories in
    /// which an object's own state decides its next state.
    pub causal_head_exclusion: bool,
}

impl Default for SpaceOptions {
    fn default() -> Self {
        SpaceOptions {
            symmetry_breaking: true,
            redundancy_pruning: true,
            partial_schemes: false,
            causal_head_exclusion: false,
        }
    }
}

/// Variable-ordering symmetry breaking: keep unless some body variable X has
/// a same-type Y < X with neither p(Y) nor p(Y,X) in the body.
pub fn prune_variable_symmetry(rule: &Rule, sig: &TypeSignature) -> bool {
    let body_vars: BTreeSet<&String> = rule.body.iter().flat_map(|a| a.args.iter()).collect();
    for x in body_vars {
        let Some(ty) = sig.variables.get(x) else { continue };
        for y in sig.vars_of(ty) {
            if y >= x.as_str() {
                continue;
            }
            let anchored = rule.body.iter().any(|a| {
                (a.arity() == 1 && a.args[0] == y) || (a.arity() == 2 && a.args[0] == y && a.args[1] == *x)
            });
            if !anchored {
                return false;
            }
        }
    }
    true
}

/// Rule-set symmetry breaking: among rules of the same kind, a later rule
/// may not have a body atom smaller than every body atom of an earlier one.
pub fn prune_ruleset_symmetry(rules: &[Rule], atom_order: &[Atom]) -> bool {
    let rank = |a: &Atom| atom_order.iter().position(|b| b == a).unwrap_or(usize::MAX);
    let mins: Vec<usize> = rules
        .iter()
        .map(|r| r.body.iter().map(rank).min().unwrap_or(usize::MAX))
        .collect();
    for i in 0..rules.len() {
        for j in i + 1..rules.len() {
            if rules[i].kind == rules[j].kind && mins[j] < mins[i] {
                return false;
            }
        }
    }
    true
}

/// All type-preserving renamings of the signature's variables.
pub fn variable_permutations(sig: &TypeSignature) -> Vec<BTreeMap<String, String>> {
    let mut out = vec![BTreeMap::new()];
    for ty in &sig.types {
        let vars: Vec<String> = sig.vars_of(ty).into_iter().map(String::from).collect();
        let mut perms = Vec::new();
        permute(&vars, &mut Vec::new(), &mut vec![false; vars.len()], &mut perms);
        let mut next = Vec::new();
        for base in &out {
            for p in &perms {
                let mut m = base.clone();
                for (v, w) in vars.iter().zip(p) {
                    m.insert(v.clone(), w.clone());
                }
                next.push(m);
            }
        }
        out = next;
    }
    out
}

fn permute(items: &[String], cur: &mut Vec<String>, used: &mut Vec<bool>, out: &mut Vec<Vec<String>>) {
    if cur.len() == items.len() {
        out.push(cur.clone());
        return;
    }
    for i in 0..items.len() {
        if !used[i] {
            used[i] = true;
            cur.push(items[i].clone());
            permute(items, cur, used, out);
            cur.pop();
            used[i] = false;
        }
    }
}

pub fn rename_rule(rule: &Rule, map: &BTreeMap<String, String>) -> Rule {
    let ren = |a: &Atom| Atom {
        pred: a.pred.clone(),
        args: a.args.iter().map(|v| map.get(v).cloned().unwrap_or_else(|| v.clone())).collect(),
    };
    Rule::new(rule.kind, rule.body.iter().map(ren).collect(), ren(&rule.head))
}

/// Smallest renaming of a rule; equal for rules that differ only in names.
pub fn canonical_rule(rule: &Rule, perms: &[BTreeMap<String, String>]) -> Rule {
    perms.iter().map(|p| rename_rule(rule, p)).min().unwrap_or_else(|| rule.clone())
}

/// The variable breaker alone can reject every renaming of a rule (for
/// instance a body mentioning only the larger of two variables in binary
/// atoms). Such rules keep their smallest renaming so no optimum is lost.
pub fn keep_rule(rule: &Rule, sig: &TypeSignature, perms: &[BTreeMap<String, String>]) -> bool {
    if prune_variable_symmetry(rule, sig) {
        return true;
    }
    let images: Vec<Rule> = perms.iter().map(|p| rename_rule(rule, p)).collect();
    if images.iter().any(|r| prune_variable_symmetry(r, sig)) {
        return false;
    }
    images.iter().all(|r| rule <= r)
}

/// Two unground atoms that can never hold together under the scheme.
pub fn var_incompossible(a: &Atom, b: &Atom, scheme: &BTreeSet<Constraint>) -> bool {
    if a.args != b.args || a.pred == b.pred {
        return false;
    }
    scheme.iter().any(|c| match c {
        Constraint::XorUnary { preds, .. } | Constraint::XorBinary { preds, .. } => {
            preds.contains(&a.pred) && preds.contains(&b.pred)
        }
        Constraint::ExistsUnique { .. } => false,
    })
}

/// Rules that can never fire, or static rules that can only fire into a
/// contradiction. With `causal_heads` the head test applies to causal rules
/// as well.
pub fn redundant(rule: &Rule, scheme: &BTreeSet<Constraint>, causal_heads: bool) -> bool {
    for (i, a) in rule.body.iter().enumerate() {
        for b in &rule.body[i + 1..] {
            if var_incompossible(a, b, scheme) {
                return true;
            }
        }
    }
    (rule.kind == RuleKind::Static || causal_heads) && rule.body.iter().any(|b| var_incompossible(b, &rule.head, scheme))
}

/// Set partitions of `items` as lists of blocks, blocks in first-element order.
fn set_partitions<T: Clone>(items: &[T]) -> Vec<Vec<Vec<T>>> {
    let mut out = Vec::new();
    fn go<T: Clone>(items: &[T], i: usize, blocks: &mut Vec<Vec<T>>, out: &mut Vec<Vec<Vec<T>>>) {
        if i == items.len() {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(items[i].clone());
            go(items, i + 1, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![items[i].clone()]);
        go(items, i + 1, blocks, out);
        blocks.pop();
    }
    go(items, 0, &mut Vec::new(), &mut out);
    out
}

/// Constraint schemes over every predicate not in `exempt`. With `partial`
/// a predicate may also be left unconstrained.
pub fn constraint_schemes(sig: &TypeSignature, exempt: &BTreeSet<String>, partial: bool) -> Vec<BTreeSet<Constraint>> {
    let mut unary: BTreeMap<String, Vec<String>> = BTreeMap::new();
    let mut binary: BTreeMap<(String, String), Vec<String>> = BTreeMap::new();
    for (p, tys) in &sig.predicates {
        if exempt.contains(p) {
            continue;
        }
        if tys.len() == 1 {
            unary.entry(tys[0].clone()).or_default().push(p.clone());
        } else {
            binary.entry((tys[0].clone(), tys[1].clone())).or_default().push(p.clone());
        }
    }
    // Options per group: each a list of constraints.
    let mut groups: Vec<Vec<Vec<Constraint>>> = Vec::new();
    for (ty, preds) in &unary {
        let mut opts = Vec::new();
        for part in set_partitions(preds) {
            let mut cs = Vec::new();
            let mut ok = true;
            for block in part {
                if block.len() >= 2 {
                    cs.push(Constraint::XorUnary {
                        ty: ty.clone(),
                        preds: sorted(block),
                    });
                } else if !partial {
                    ok = false;
                }
            }
            if ok {
                opts.push(cs);
            }
        }
        groups.push(opts);
    }
    for ((t1, t2), preds) in &binary {
        let mut opts = Vec::new();
        for part in set_partitions(preds) {
            let mut choices: Vec<Vec<Constraint>> = vec![Vec::new()];
            for block in part {
                let alts: Vec<Option<Constraint>> = if block.len() >= 2 {
                    vec![Some(Constraint::XorBinary {
                        ty1: t1.clone(),
                        ty2: t2.clone(),
                        preds: sorted(block),
                    })]
                } else {
                    let u = Some(Constraint::ExistsUnique { pred: block[0].clone() });
                    if partial {
                        vec![None, u]
                    } else {
                        vec![u]
                    }
                };
                let mut next = Vec::new();
                for c in &choices {
                    for a in &alts {
                        let mut c2 = c.clone();
                        c2.extend(a.clone());
                        next.push(c2);
                    }
                }
                choices = next;
            }
            opts.extend(choices);
        }
        groups.push(opts);
    }
    let mut schemes: Vec<BTreeSet<Constraint>> = vec![BTreeSet::new()];
    for opts in groups {
        let mut next = Vec::new();
        for s in &schemes {
            for o in &opts {
                let mut s2 = s.clone();
                s2.extend(o.iter().cloned());
                next.push(s2);
            }
        }
        schemes = next;
    }
    let mut keyed: Vec<(usize, String, BTreeSet<Constraint>)> = schemes
        .into_iter()
        .map(|s| {
            let key: Vec<String> = s.iter().map(|c| c.to_string()).collect();
            (s.len(), key.join(";"), s)
        })
        .collect();
    keyed.sort();
    keyed.dedup_by(|a, b| a.1 == b.1);
    keyed.into_iter().map(|(_, _, s)| s).collect()
}

/// Full schemes: every predicate constrained exactly once.
pub fn enumerate_constraint_schemes(sig: &TypeSignature) -> Vec<BTreeSet<Constraint>> {
    constraint_schemes(sig, &BTreeSet::new(), false)
}

fn sorted(mut v: Vec<String>) -> Vec<String> {
    v.sort();
    v
}

/// Candidate rules and schemes for one template.
#[derive(Debug, Clone)]
pub struct HypothesisSpace {
    pub template: Template,
    /// U in canonical order; also the order used by the rule-set breaker.
    pub atom_order: Vec<Atom>,
    /// Safe, well-typed, symmetry-pruned rules, scheme-independent.
    pub candidate_rules: Vec<Rule>,
    pub candidate_inits: Vec<Atom>,
    pub constraint_schemes: Vec<BTreeSet<Constraint>>,
    pub options: SpaceOptions,
}

impl HypothesisSpace {
    /// `given` are background predicates: never heads, never constrained.
    pub fn new(template: &Template, given: &BTreeSet<String>, options: SpaceOptions) -> HypothesisSpace {
        let sig = &template.signature;
        let atom_order: Vec<Atom> = sig.unground_atoms().into_iter().collect();
        let perms = variable_permutations(sig);
        let mut candidate_rules = Vec::new();
        let kinds: Vec<RuleKind> = [(RuleKind::Static, template.n_static), (RuleKind::Causal, template.n_causal)]
            .into_iter()
            .filter(|(_, n)| *n > 0)
            .map(|(k, _)| k)
            .collect();
        let heads: Vec<&Atom> = atom_order
            .iter()
            .filter(|a| !sig.permanent.contains(&a.pred) && !given.contains(&a.pred))
            .collect();
        let mut bodies = Vec::new();
        combinations(atom_order.len(), template.n_body, &mut Vec::new(), 0, &mut bodies);
        for body in &bodies {
            let body_atoms: Vec<Atom> = body.iter().map(|&i| atom_order[i].clone()).collect();
            let body_vars: BTreeSet<&String> = body_atoms.iter().flat_map(|a| a.args.iter()).collect();
            for head in &heads {
                if body_atoms.contains(head) || !head.args.iter().all(|v| body_vars.contains(v)) {
                    continue;
                }
                for &kind in &kinds {
                    let rule = Rule::new(kind, body_atoms.clone(), (*head).clone());
                    if options.symmetry_breaking && !keep_rule(&rule, sig, &perms) {
                        continue;
                    }
                    candidate_rules.push(rule);
                }
            }
        }
        let rank = |a: &Atom| atom_order.binary_search(a).expect("atom in U");
        candidate_rules.sort_by(|a, b| {
            (a.kind, rank(&a.body[0]), a).cmp(&(b.kind, rank(&b.body[0]), b))
        });
        let candidate_inits = sig
            .ground_atoms()
            .into_iter()
            .filter(|a| !given.contains(&a.pred))
            .collect();
        HypothesisSpace {
            template: template.clone(),
            atom_order,
            candidate_rules,
            candidate_inits,
            constraint_schemes: constraint_schemes(sig, given, options.partial_schemes),
            options,
        }
    }

    /// Candidates that survive redundancy pruning under `scheme`.
    pub fn rules_for(&self, scheme: &BTreeSet<Constraint>) -> Vec<Rule> {
        self.candidate_rules
            .iter()
            .filter(|r| !self.options.redundancy_pruning || !redundant(r, scheme, self.options.causal_head_exclusion))
            .cloned()
            .collect()
    }
}

/// Index combinations of size 1..=k, in lexicographic order.
fn combinations(n: usize, k: usize, cur: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if !cur.is_empty() {
        out.push(cur.clone());
    }
    if cur.len() == k {
        return;
    }
    for i in start..n {
        cur.push(i);
        combinations(n, k, cur, i + 1, out);
        cur.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::parse_atom;

    fn sig() -> TypeSignature {
        let mut s = TypeSignature::new();
        s.add_type("t").unwrap();
        s.add_object("a", "t").unwrap();
        s.add_pred("p", &["t", "t"]).unwrap();
        s.add_pred("q", &["t"]).unwrap();
        s.add_pred("r", &["t"]).unwrap();
        s.add_var("x", "t").unwrap();
        s.add_var("y", "t").unwrap();
        s
    }

    fn rule(kind: RuleKind, body: &[&str], head: &str) -> Rule {
        Rule::new(kind, body.iter().map(|a| parse_atom(a).unwrap()).collect(), parse_atom(head).unwrap())
    }

    #[test]
    fn variable_symmetry_examples() {
        let s = sig();
        assert!(prune_variable_symmetry(&rule(RuleKind::Static, &["p(X,Y)"], "q(X)"), &s));
        assert!(!prune_variable_symmetry(&rule(RuleKind::Static, &["p(Y,X)"], "q(Y)"), &s));
        assert!(prune_variable_symmetry(&rule(RuleKind::Static, &["q(X)"], "r(X)"), &s));
    }

    #[test]
    fn ruleset_symmetry_examples() {
        let s = sig();
        let order: Vec<Atom> = s.unground_atoms().into_iter().collect();
        let r1 = rule(RuleKind::Static, &["q(X)"], "r(X)");
        let r2 = rule(RuleKind::Static, &["p(X,X)"], "q(X)");
        assert!(!prune_ruleset_symmetry(&[r1.clone(), r2.clone()], &order));
        assert!(prune_ruleset_symmetry(&[r2, r1.clone()], &order));
        assert!(prune_ruleset_symmetry(&[r1], &order));
    }

    #[test]
    fn hybrid_keeps_a_representative_of_every_rule() {
        let s = sig();
        let perms = variable_permutations(&s);
        // Neither renaming passes the plain breaker: Y is never anchored by X.
        let r = rule(RuleKind::Causal, &["p(X,X)", "p(Y,Y)"], "q(X)");
        assert!(!prune_variable_symmetry(&r, &s));
        let images: Vec<Rule> = perms.iter().map(|p| rename_rule(&r, p)).collect();
        let kept = images.iter().filter(|i| keep_rule(i, &s, &perms)).count();
        assert_eq!(kept, 1);
    }

    #[test]
    fn schemes_for_small_signatures() {
        let mut s = TypeSignature::new();
        s.add_type("s").unwrap();
        s.add_pred("on", &["s"]).unwrap();
        s.add_pred("off", &["s"]).unwrap();
        let sch = enumerate_constraint_schemes(&s);
        assert_eq!(sch.len(), 1);
        assert_eq!(sch[0].iter().next().unwrap().to_string(), "xor off on");

        let mut b = TypeSignature::new();
        b.add_type("s").unwrap();
        b.add_pred("r", &["s", "s"]).unwrap();
        let sch = enumerate_constraint_schemes(&b);
        assert_eq!(sch.len(), 1);
        assert_eq!(sch[0].iter().next().unwrap().to_string(), "unique r");

        let mut one = TypeSignature::new();
        one.add_type("s").unwrap();
        one.add_pred("p", &["s"]).unwrap();
        assert!(enumerate_constraint_schemes(&one).is_empty());
    }

    #[test]
    fn schemes_include_the_three_way_group() {
        let mut s = TypeSignature::new();
        s.add_type("s").unwrap();
        for p in ["on", "off", "p1", "p2", "p3"] {
            s.add_pred(p, &["s"]).unwrap();
        }
        let sch = enumerate_constraint_schemes(&s);
        let want: Vec<String> = vec!["xor off on".into(), "xor p1 p2 p3".into()];
        assert!(sch.iter().any(|c| c.iter().map(|c| c.to_string()).collect::<Vec<_>>() == want));
        // Counts never decrease along the stream.
        assert!(sch.windows(2).all(|w| w[0].len() <= w[1].len()));
    }
}
