//! Vocabulary of theories: signatures, atoms, rules, constraints, sequences
//! and templates, with type checking, grounding and the line-oriented text
//! formats.

mod parse;

pub use parse::{parse_atom, parse_sequence, parse_templates, parse_theory, Document, Item};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LangError {
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("unknown name `{0}` (neither an object nor a variable)")]
    UnknownName(String),
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("`{pred}` expects {expected} argument(s), got {got}")]
    Arity { pred: String, expected: usize, got: usize },
    #[error("atom `{0}` mixes objects and variables")]
    MixedAtom(String),
    #[error("atom `{0}` must be ground")]
    NotGround(String),
    #[error("atom `{0}` must not contain objects")]
    NotUnground(String),
    #[error("atom `{0}` is not well-typed")]
    IllTyped(String),
    #[error("variable `{var}` of `{atom}` has no binding")]
    MissingBinding { atom: String, var: String },
    #[error("name `{0}` is declared twice")]
    Duplicate(String),
    #[error("rule `{0}` is unsafe: a head variable does not occur in the body")]
    Unsafe(String),
    #[error("rule `{0}` has an empty body")]
    EmptyBody(String),
    #[error("constraint `{0}` is malformed: {1}")]
    BadConstraint(String, String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, LangError>;

/// Canonical form of an identifier.
pub fn canon(name: &str) -> String {
    name.to_ascii_lowercase()
}

pub fn is_ident(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

// ---------------------------------------------------------------------------
// Atoms
// ---------------------------------------------------------------------------

/// A predicate applied to one or two names. Whether the names are objects or
/// variables is decided against a signature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: String,
    pub args: Vec<String>,
}

impl Atom {
    pub fn new(pred: &str, args: &[&str]) -> Atom {
        Atom {
            pred: canon(pred),
            args: args.iter().map(|a| canon(a)).collect(),
        }
    }

    pub fn unary(pred: &str, a: &str) -> Atom {
        Atom::new(pred, &[a])
    }

    pub fn binary(pred: &str, a: &str, b: &str) -> Atom {
        Atom::new(pred, &[a, b])
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.pred, self.args.join(","))
    }
}

/// Variable assignment used to ground an unground atom.
pub type Subst = BTreeMap<String, String>;

pub fn apply_subst(atom: &Atom, subst: &Subst) -> Result<Atom> {
    let mut args = Vec::with_capacity(atom.args.len());
    for v in &atom.args {
        match subst.get(v) {
            Some(o) => args.push(o.clone()),
            None => {
                return Err(LangError::MissingBinding {
                    atom: atom.to_string(),
                    var: v.clone(),
                })
            }
        }
    }
    Ok(Atom {
        pred: atom.pred.clone(),
        args,
    })
}

// ---------------------------------------------------------------------------
// Signature
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AtomKind {
    Ground,
    Unground,
}

/// Types, typed objects, typed predicates and typed variables.
///
/// `permanent` marks predicates whose atoms never change once the initial
/// state is fixed; rules may read them but never derive them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct TypeSignature {
    pub types: BTreeSet<String>,
    pub objects: BTreeMap<String, String>,
    pub predicates: BTreeMap<String, Vec<String>>,
    pub variables: BTreeMap<String, String>,
    pub permanent: BTreeSet<String>,
}

impl TypeSignature {
    pub fn new() -> Self {
        Self::default()
    }

    fn name_free(&self, name: &str) -> Result<()> {
        if self.objects.contains_key(name)
            || self.predicates.contains_key(name)
            || self.variables.contains_key(name)
        {
            return Err(LangError::Duplicate(name.to_string()));
        }
        Ok(())
    }

    fn known_type(&self, ty: &str) -> Result<()> {
        if self.types.contains(ty) {
            Ok(())
        } else {
            Err(LangError::UnknownType(ty.to_string()))
        }
    }

    pub fn add_type(&mut self, ty: &str) -> Result<()> {
        let ty = canon(ty);
        if !is_ident(&ty) {
            return Err(LangError::Invalid(format!("bad type name `{ty}`")));
        }
        if !self.types.insert(ty.clone()) {
            return Err(LangError::Duplicate(ty));
        }
        Ok(())
    }

    pub fn add_object(&mut self, name: &str, ty: &str) -> Result<()> {
        let (name, ty) = (canon(name), canon(ty));
        self.known_type(&ty)?;
        self.name_free(&name)?;
        self.objects.insert(name, ty);
        Ok(())
    }

    pub fn add_pred(&mut self, name: &str, arg_types: &[&str]) -> Result<()> {
        let name = canon(name);
        if arg_types.is_empty() || arg_types.len() > 2 {
            return Err(LangError::Invalid(format!(
                "predicate `{name}` must have arity 1 or 2"
            )));
        }
        let tys: Vec<String> = arg_types.iter().map(|t| canon(t)).collect();
        for t in &tys {
            self.known_type(t)?;
        }
        self.name_free(&name)?;
        self.predicates.insert(name, tys);
        Ok(())
    }

    pub fn add_var(&mut self, name: &str, ty: &str) -> Result<()> {
        let (name, ty) = (canon(name), canon(ty));
        self.known_type(&ty)?;
        self.name_free(&name)?;
        self.variables.insert(name, ty);
        Ok(())
    }

    pub fn set_permanent(&mut self, pred: &str) -> Result<()> {
        let pred = canon(pred);
        if !self.predicates.contains_key(&pred) {
            return Err(LangError::UnknownPredicate(pred));
        }
        self.permanent.insert(pred);
        Ok(())
    }

    pub fn arg_types(&self, pred: &str) -> Option<&[String]> {
        self.predicates.get(pred).map(|v| v.as_slice())
    }

    pub fn is_unary(&self, pred: &str) -> bool {
        self.arg_types(pred).map_or(false, |t| t.len() == 1)
    }

    pub fn objects_of(&self, ty: &str) -> Vec<&str> {
        self.objects
            .iter()
            .filter(|(_, t)| t.as_str() == ty)
            .map(|(o, _)| o.as_str())
            .collect()
    }

    pub fn vars_of(&self, ty: &str) -> Vec<&str> {
        self.variables
            .iter()
            .filter(|(_, t)| t.as_str() == ty)
            .map(|(v, _)| v.as_str())
            .collect()
    }

    /// Type of a name used as an argument, together with whether it is a variable.
    fn term_type(&self, name: &str) -> Result<(&str, bool)> {
        if let Some(t) = self.objects.get(name) {
            return Ok((t, false));
        }
        if let Some(t) = self.variables.get(name) {
            return Ok((t, true));
        }
        Err(LangError::UnknownName(name.to_string()))
    }

    /// Classifies an atom as ground or unground; mixed atoms are rejected.
    pub fn atom_kind(&self, atom: &Atom) -> Result<AtomKind> {
        let tys = self
            .arg_types(&atom.pred)
            .ok_or_else(|| LangError::UnknownPredicate(atom.pred.clone()))?;
        if tys.len() != atom.args.len() {
            return Err(LangError::Arity {
                pred: atom.pred.clone(),
                expected: tys.len(),
                got: atom.args.len(),
            });
        }
        let mut vars = 0;
        for a in &atom.args {
            if self.term_type(a)?.1 {
                vars += 1;
            }
        }
        match vars {
            0 => Ok(AtomKind::Ground),
            n if n == atom.args.len() => Ok(AtomKind::Unground),
            _ => Err(LangError::MixedAtom(atom.to_string())),
        }
    }

    /// True iff every argument's declared type matches the predicate's
    /// argument type at that position. Unknown names are errors.
    pub fn well_typed(&self, atom: &Atom) -> Result<bool> {
        self.atom_kind(atom)?;
        let tys = &self.predicates[&atom.pred];
        for (a, t) in atom.args.iter().zip(tys) {
            if self.term_type(a)?.0 != t {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn expect_typed(&self, atom: &Atom, kind: AtomKind) -> Result<()> {
        let k = self.atom_kind(atom)?;
        if k != kind {
            return Err(match kind {
                AtomKind::Ground => LangError::NotGround(atom.to_string()),
                AtomKind::Unground => LangError::NotUnground(atom.to_string()),
            });
        }
        if !self.well_typed(atom)? {
            return Err(LangError::IllTyped(atom.to_string()));
        }
        Ok(())
    }

    pub fn check_ground(&self, atom: &Atom) -> Result<()> {
        self.expect_typed(atom, AtomKind::Ground)
    }

    pub fn check_unground(&self, atom: &Atom) -> Result<()> {
        self.expect_typed(atom, AtomKind::Unground)
    }

    fn instantiate(&self, pick: impl Fn(&str) -> Vec<String>) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for (p, tys) in &self.predicates {
            let firsts = pick(&tys[0]);
            if tys.len() == 1 {
                for a in firsts {
                    out.insert(Atom {
                        pred: p.clone(),
                        args: vec![a],
                    });
                }
            } else {
                let seconds = pick(&tys[1]);
                for a in &firsts {
                    for b in &seconds {
                        out.insert(Atom {
                            pred: p.clone(),
                            args: vec![a.clone(), b.clone()],
                        });
                    }
                }
            }
        }
        out
    }

    /// Every well-typed ground atom.
    pub fn ground_atoms(&self) -> BTreeSet<Atom> {
        self.instantiate(|t| self.objects_of(t).into_iter().map(String::from).collect())
    }

    /// Every well-typed unground atom.
    pub fn unground_atoms(&self) -> BTreeSet<Atom> {
        self.instantiate(|t| self.vars_of(t).into_iter().map(String::from).collect())
    }

    /// All total type-respecting maps from `vars` to objects.
    pub fn substitutions_over<'a>(&self, vars: impl IntoIterator<Item = &'a String>) -> Vec<Subst> {
        let mut out = vec![Subst::new()];
        for v in vars {
            let objs = match self.variables.get(v) {
                Some(t) => self.objects_of(t),
                None => Vec::new(),
            };
            let mut next = Vec::with_capacity(out.len() * objs.len());
            for s in &out {
                for o in &objs {
                    let mut s2 = s.clone();
                    s2.insert(v.clone(), o.to_string());
                    next.push(s2);
                }
            }
            out = next;
        }
        out
    }

    /// All total type-respecting maps from the signature's variables to objects.
    pub fn substitutions(&self) -> Vec<Subst> {
        self.substitutions_over(self.variables.keys())
    }

    /// Structural validity of the declarations themselves.
    pub fn validate(&self) -> Result<()> {
        for t in self.objects.values().chain(self.variables.values()) {
            self.known_type(t)?;
        }
        for (p, tys) in &self.predicates {
            if tys.is_empty() || tys.len() > 2 {
                return Err(LangError::Invalid(format!("predicate `{p}` must have arity 1 or 2")));
            }
            for t in tys {
                self.known_type(t)?;
            }
        }
        for o in self.objects.keys() {
            if self.predicates.contains_key(o) || self.variables.contains_key(o) {
                return Err(LangError::Duplicate(o.clone()));
            }
        }
        for p in self.predicates.keys() {
            if self.variables.contains_key(p) {
                return Err(LangError::Duplicate(p.clone()));
            }
        }
        for p in &self.permanent {
            if !self.predicates.contains_key(p) {
                return Err(LangError::UnknownPredicate(p.clone()));
            }
        }
        Ok(())
    }

    /// Merges another signature's declarations into this one.
    pub fn extend(&mut self, other: &TypeSignature) -> Result<()> {
        for t in &other.types {
            self.types.insert(t.clone());
        }
        for (o, t) in &other.objects {
            match self.objects.get(o) {
                Some(t0) if t0 == t => {}
                Some(_) => return Err(LangError::Duplicate(o.clone())),
                None => self.add_object(o, t)?,
            }
        }
        for (p, tys) in &other.predicates {
            match self.predicates.get(p) {
                Some(t0) if t0 == tys => {}
                Some(_) => return Err(LangError::Duplicate(p.clone())),
                None => {
                    let tys: Vec<&str> = tys.iter().map(String::as_str).collect();
                    self.add_pred(p, &tys)?
                }
            }
        }
        for (v, t) in &other.variables {
            match self.variables.get(v) {
                Some(t0) if t0 == t => {}
                Some(_) => return Err(LangError::Duplicate(v.clone())),
                None => self.add_var(v, t)?,
            }
        }
        for p in &other.permanent {
            self.permanent.insert(p.clone());
        }
        Ok(())
    }
}

pub fn well_typed(atom: &Atom, sig: &TypeSignature) -> Result<bool> {
    sig.well_typed(atom)
}

pub fn ground_atoms(sig: &TypeSignature) -> BTreeSet<Atom> {
    sig.ground_atoms()
}

pub fn unground_atoms(sig: &TypeSignature) -> BTreeSet<Atom> {
    sig.unground_atoms()
}

pub fn substitutions(sig: &TypeSignature) -> Vec<Subst> {
    sig.substitutions()
}

// ---------------------------------------------------------------------------
// Rules and constraints
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    Static,
    Causal,
}

impl RuleKind {
    pub fn arrow(self) -> &'static str {
        match self {
            RuleKind::Static => "->",
            RuleKind::Causal => ">>",
        }
    }
}

/// A definite clause over unground atoms. The body is kept sorted and free of
/// duplicates so that equal rules compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub kind: RuleKind,
    pub body: Vec<Atom>,
    pub head: Atom,
}

impl Rule {
    pub fn new(kind: RuleKind, mut body: Vec<Atom>, head: Atom) -> Rule {
        body.sort();
        body.dedup();
        Rule { kind, body, head }
    }

    pub fn causal(body: Vec<Atom>, head: Atom) -> Rule {
        Rule::new(RuleKind::Causal, body, head)
    }

    pub fn static_rule(body: Vec<Atom>, head: Atom) -> Rule {
        Rule::new(RuleKind::Static, body, head)
    }

    pub fn variables(&self) -> BTreeSet<String> {
        self.body
            .iter()
            .chain(std::iter::once(&self.head))
            .flat_map(|a| a.args.iter().cloned())
            .collect()
    }

    pub fn is_safe(&self) -> bool {
        let body_vars: BTreeSet<&String> = self.body.iter().flat_map(|a| a.args.iter()).collect();
        self.head.args.iter().all(|v| body_vars.contains(v))
    }

    pub fn validate(&self, sig: &TypeSignature) -> Result<()> {
        if self.body.is_empty() {
            return Err(LangError::EmptyBody(self.to_string()));
        }
        for a in self.body.iter().chain(std::iter::once(&self.head)) {
            sig.check_unground(a)?;
        }
        if !self.is_safe() {
            return Err(LangError::Unsafe(self.to_string()));
        }
        Ok(())
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let body: Vec<String> = self.body.iter().map(|a| a.to_string()).collect();
        write!(f, "{} {} {}", body.join(", "), self.kind.arrow(), self.head)
    }
}

/// Exclusion and uniqueness constraints. Predicate lists are kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constraint {
    XorUnary { ty: String, preds: Vec<String> },
    XorBinary { ty1: String, ty2: String, preds: Vec<String> },
    ExistsUnique { pred: String },
}

impl Constraint {
    pub fn xor(sig: &TypeSignature, preds: &[&str]) -> Result<Constraint> {
        let mut ps: Vec<String> = preds.iter().map(|p| canon(p)).collect();
        ps.sort();
        ps.dedup();
        let first = ps
            .first()
            .ok_or_else(|| LangError::BadConstraint("xor".into(), "no predicates".into()))?;
        let tys = sig
            .arg_types(first)
            .ok_or_else(|| LangError::UnknownPredicate(first.clone()))?
            .to_vec();
        let c = if tys.len() == 1 {
            Constraint::XorUnary {
                ty: tys[0].clone(),
                preds: ps,
            }
        } else {
            Constraint::XorBinary {
                ty1: tys[0].clone(),
                ty2: tys[1].clone(),
                preds: ps,
            }
        };
        c.validate(sig)?;
        Ok(c)
    }

    pub fn unique(sig: &TypeSignature, pred: &str) -> Result<Constraint> {
        let c = Constraint::ExistsUnique { pred: canon(pred) };
        c.validate(sig)?;
        Ok(c)
    }

    pub fn preds(&self) -> Vec<&str> {
        match self {
            Constraint::XorUnary { preds, .. } | Constraint::XorBinary { preds, .. } => {
                preds.iter().map(String::as_str).collect()
            }
            Constraint::ExistsUnique { pred } => vec![pred.as_str()],
        }
    }

    pub fn validate(&self, sig: &TypeSignature) -> Result<()> {
        let bad = |msg: &str| LangError::BadConstraint(self.to_string(), msg.to_string());
        match self {
            Constraint::XorUnary { ty, preds } => {
                if preds.len() < 2 {
                    return Err(bad("needs at least two predicates"));
                }
                for p in preds {
                    let tys = sig.arg_types(p).ok_or_else(|| LangError::UnknownPredicate(p.clone()))?;
                    if tys != [ty.clone()] {
                        return Err(bad("predicates must share one unary argument type"));
                    }
                }
            }
            Constraint::XorBinary { ty1, ty2, preds } => {
                if preds.len() < 2 {
                    return Err(bad("needs at least two predicates"));
                }
                for p in preds {
                    let tys = sig.arg_types(p).ok_or_else(|| LangError::UnknownPredicate(p.clone()))?;
                    if tys != [ty1.clone(), ty2.clone()] {
                        return Err(bad("predicates must share one binary argument type list"));
                    }
                }
            }
            Constraint::ExistsUnique { pred } => {
                let tys = sig.arg_types(pred).ok_or_else(|| LangError::UnknownPredicate(pred.clone()))?;
                if tys.len() != 2 {
                    return Err(bad("uniqueness applies to binary predicates"));
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Constraint::XorUnary { preds, .. } => write!(f, "xor {}", preds.join(" ")),
            Constraint::XorBinary { preds, .. } => write!(f, "xor2 {}", preds.join(" ")),
            Constraint::ExistsUnique { pred } => write!(f, "unique {pred}"),
        }
    }
}

// ---------------------------------------------------------------------------
// Theories, sequences, templates
// ---------------------------------------------------------------------------

/// θ = (φ, I, R, C), plus background facts that are given rather than chosen.
/// Facts hold in every state and are not part of the theory's cost.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Theory {
    pub signature: TypeSignature,
    pub inits: BTreeSet<Atom>,
    pub rules: BTreeSet<Rule>,
    pub constraints: BTreeSet<Constraint>,
    pub facts: BTreeSet<Atom>,
}

impl Theory {
    pub fn new(signature: TypeSignature) -> Theory {
        Theory {
            signature,
            ..Theory::default()
        }
    }

    pub fn static_rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| r.kind == RuleKind::Static)
    }

    pub fn causal_rules(&self) -> impl Iterator<Item = &Rule> {
        self.rules.iter().filter(|r| r.kind == RuleKind::Causal)
    }

    /// Predicates that only occur through background facts.
    pub fn given_preds(&self) -> BTreeSet<String> {
        self.facts.iter().map(|a| a.pred.clone()).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let sig = &self.signature;
        sig.validate()?;
        for a in self.inits.iter().chain(&self.facts) {
            sig.check_ground(a)?;
        }
        for r in &self.rules {
            r.validate(sig)?;
        }
        let mut seen = BTreeSet::new();
        for c in &self.constraints {
            c.validate(sig)?;
            for p in c.preds() {
                if !seen.insert(p.to_string()) {
                    return Err(LangError::BadConstraint(
                        c.to_string(),
                        format!("`{p}` already occurs in another constraint"),
                    ));
                }
            }
        }
        Ok(())
    }
}

fn write_signature(f: &mut fmt::Formatter<'_>, sig: &TypeSignature) -> fmt::Result {
    for t in &sig.types {
        writeln!(f, "type {t}")?;
    }
    for (o, t) in &sig.objects {
        writeln!(f, "object {o} {t}")?;
    }
    for (p, tys) in &sig.predicates {
        writeln!(f, "pred {p}({})", tys.join(","))?;
    }
    for (v, t) in &sig.variables {
        writeln!(f, "var {v} {t}")?;
    }
    for p in &sig.permanent {
        writeln!(f, "permanent {p}")?;
    }
    Ok(())
}

impl fmt::Display for TypeSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_signature(f, self)
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_signature(f, &self.signature)?;
        for a in &self.facts {
            writeln!(f, "fact {a}")?;
        }
        for a in &self.inits {
            writeln!(f, "init {a}")?;
        }
        for r in &self.rules {
            writeln!(f, "rule {r}")?;
        }
        for c in &self.constraints {
            writeln!(f, "{c}")?;
        }
        Ok(())
    }
}

/// S₁…S_T. Steps are 1-based in the text format and 0-based in `steps`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SensorySequence {
    pub steps: Vec<BTreeSet<Atom>>,
}

impl SensorySequence {
    pub fn new(steps: Vec<BTreeSet<Atom>>) -> SensorySequence {
        SensorySequence { steps }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// State at 1-based time `t`.
    pub fn at(&self, t: usize) -> &BTreeSet<Atom> {
        &self.steps[t - 1]
    }

    pub fn atom_count(&self) -> usize {
        self.steps.iter().map(|s| s.len()).sum()
    }

    pub fn validate(&self, sig: &TypeSignature) -> Result<()> {
        for s in &self.steps {
            for a in s {
                sig.check_ground(a)?;
            }
        }
        Ok(())
    }
}

pub fn write_state(f: &mut impl fmt::Write, keyword: &str, t: usize, atoms: &BTreeSet<Atom>) -> fmt::Result {
    write!(f, "{keyword} {t} {{")?;
    for a in atoms {
        write!(f, " {a}")?;
    }
    writeln!(f, " }}")
}

impl fmt::Display for SensorySequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            write_state(f, "at", i + 1, s)?;
        }
        Ok(())
    }
}

/// χ = (φ, N→, N⇒, N_B): one finite hypothesis space.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Template {
    pub signature: TypeSignature,
    pub n_static: usize,
    pub n_causal: usize,
    pub n_body: usize,
}

impl Template {
    pub fn validate(&self) -> Result<()> {
        self.signature.validate()?;
        if self.n_body < 1 {
            return Err(LangError::Invalid("template needs body >= 1".into()));
        }
        if self.n_static + self.n_causal < 1 {
            return Err(LangError::Invalid("template needs at least one rule".into()));
        }
        Ok(())
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_signature(f, &self.signature)?;
        writeln!(f, "static {}", self.n_static)?;
        writeln!(f, "causal {}", self.n_causal)?;
        writeln!(f, "body {}", self.n_body)
    }
}

pub fn write_templates(templates: &[Template]) -> String {
    templates
        .iter()
        .map(|t| t.to_string())
        .collect::<Vec<_>>()
        .join("---\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig_s() -> TypeSignature {
        let mut s = TypeSignature::new();
        s.add_type("s").unwrap();
        s.add_object("a", "s").unwrap();
        s.add_object("b", "s").unwrap();
        s.add_pred("on", &["s"]).unwrap();
        s.add_pred("off", &["s"]).unwrap();
        s
    }

    #[test]
    fn well_typed_matches_declarations() {
        let mut s = TypeSignature::new();
        s.add_type("cell").unwrap();
        s.add_type("finger").unwrap();
        s.add_type("sensor").unwrap();
        s.add_object("c1", "cell").unwrap();
        s.add_object("f1", "finger").unwrap();
        s.add_pred("on", &["cell"]).unwrap();
        s.add_pred("part", &["finger", "sensor"]).unwrap();
        s.add_var("F", "finger").unwrap();
        s.add_var("S", "sensor").unwrap();
        assert!(s.well_typed(&Atom::unary("on", "c1")).unwrap());
        assert!(!s.well_typed(&Atom::unary("on", "f1")).unwrap());
        assert!(s.well_typed(&Atom::binary("part", "F", "S")).unwrap());
        assert!(matches!(
            s.well_typed(&Atom::unary("blink", "c1")),
            Err(LangError::UnknownPredicate(_))
        ));
        assert!(matches!(
            s.well_typed(&Atom::unary("on", "zz")),
            Err(LangError::UnknownName(_))
        ));
    }

    #[test]
    fn mixed_atoms_rejected() {
        let mut s = sig_s();
        s.add_pred("r", &["s", "s"]).unwrap();
        s.add_var("X", "s").unwrap();
        assert!(matches!(
            s.atom_kind(&Atom::binary("r", "a", "X")),
            Err(LangError::MixedAtom(_))
        ));
    }

    #[test]
    fn ground_atom_examples() {
        let g = sig_s().ground_atoms();
        let want: BTreeSet<Atom> = [
            Atom::unary("on", "a"),
            Atom::unary("on", "b"),
            Atom::unary("off", "a"),
            Atom::unary("off", "b"),
        ]
        .into_iter()
        .collect();
        assert_eq!(g, want);

        let mut s = TypeSignature::new();
        s.add_type("s").unwrap();
        s.add_object("a", "s").unwrap();
        s.add_pred("r", &["s", "s"]).unwrap();
        assert_eq!(s.ground_atoms().len(), 1);

        let mut s = TypeSignature::new();
        s.add_type("t1").unwrap();
        s.add_type("t2").unwrap();
        s.add_object("a", "t2").unwrap();
        s.add_pred("p", &["t1"]).unwrap();
        assert!(s.ground_atoms().is_empty());
    }

    #[test]
    fn unground_atom_examples() {
        let mut s = TypeSignature::new();
        s.add_type("s").unwrap();
        s.add_pred("r", &["s", "s"]).unwrap();
        s.add_var("X", "s").unwrap();
        s.add_var("Y", "s").unwrap();
        let u: Vec<String> = s.unground_atoms().iter().map(|a| a.to_string()).collect();
        assert_eq!(u, ["r(x,x)", "r(x,y)", "r(y,x)", "r(y,y)"]);
    }

    #[test]
    fn substitution_examples() {
        let mut s = sig_s();
        s.add_var("X", "s").unwrap();
        assert_eq!(s.substitutions().len(), 2);
        s.add_var("Y", "s").unwrap();
        assert_eq!(s.substitutions().len(), 4);
    }

    #[test]
    fn apply_subst_examples() {
        let mut sub = Subst::new();
        sub.insert("x".into(), "a".into());
        sub.insert("y".into(), "b".into());
        assert_eq!(apply_subst(&Atom::unary("on", "X"), &sub).unwrap(), Atom::unary("on", "a"));
        assert_eq!(
            apply_subst(&Atom::binary("r", "X", "Y"), &sub).unwrap(),
            Atom::binary("r", "a", "b")
        );
        let mut only_y = Subst::new();
        only_y.insert("y".into(), "a".into());
        assert!(matches!(
            apply_subst(&Atom::unary("p", "X"), &only_y),
            Err(LangError::MissingBinding { .. })
        ));
    }

    #[test]
    fn namespaces_are_disjoint() {
        let mut s = sig_s();
        assert!(s.add_var("a", "s").is_err());
        assert!(s.add_object("on", "s").is_err());
        assert!(s.add_pred("q", &["nosuch"]).is_err());
        assert!(s.add_pred("q", &[]).is_err());
    }

    #[test]
    fn rule_checks() {
        let mut s = sig_s();
        s.add_var("X", "s").unwrap();
        s.add_var("Y", "s").unwrap();
        let unsafe_rule = Rule::causal(vec![Atom::unary("on", "X")], Atom::unary("off", "Y"));
        assert!(matches!(unsafe_rule.validate(&s), Err(LangError::Unsafe(_))));
        let empty = Rule::causal(vec![], Atom::unary("off", "Y"));
        assert!(matches!(empty.validate(&s), Err(LangError::EmptyBody(_))));
        let ok = Rule::causal(vec![Atom::unary("on", "X")], Atom::unary("off", "X"));
        ok.validate(&s).unwrap();
    }

    #[test]
    fn constraint_checks() {
        let mut s = sig_s();
        s.add_pred("r", &["s", "s"]).unwrap();
        assert!(Constraint::xor(&s, &["on"]).is_err());
        assert!(Constraint::xor(&s, &["on", "r"]).is_err());
        assert!(Constraint::unique(&s, "on").is_err());
        assert!(Constraint::unique(&s, "r").is_ok());
        let c = Constraint::xor(&s, &["on", "off"]).unwrap();
        assert_eq!(c.to_string(), "xor off on");
    }
}
