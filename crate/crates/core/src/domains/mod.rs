//! Ground-truth generators for the experimental domains, and the task file
//! format they emit.

pub mod binding;
pub mod eca;
pub mod occlusion;
pub mod rhythm;
pub mod seek_whence;

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lang::{parse_templates, write_state, Atom, Document, Item, LangError, SensorySequence, Template, TypeSignature};
use crate::synth::{Problem, TemplateSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TaskKind {
    Prediction,
    Retrodiction,
    Imputation,
}

impl TaskKind {
    pub const ALL: [TaskKind; 3] = [TaskKind::Prediction, TaskKind::Retrodiction, TaskKind::Imputation];
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TaskKind::Prediction => "prediction",
            TaskKind::Retrodiction => "retrodiction",
            TaskKind::Imputation => "imputation",
        })
    }
}

impl FromStr for TaskKind {
    type Err = LangError;

    fn from_str(s: &str) -> Result<Self, LangError> {
        match s.to_ascii_lowercase().as_str() {
            "prediction" => Ok(TaskKind::Prediction),
            "retrodiction" => Ok(TaskKind::Retrodiction),
            "imputation" => Ok(TaskKind::Imputation),
            other => Err(LangError::Invalid(format!("unknown task kind `{other}`"))),
        }
    }
}

/// Where the templates for a task come from.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TemplateRef {
    /// Domain-independent enumeration by weight.
    Auto,
    /// One of the template files compiled into the library (`builtin:eca`).
    Builtin(String),
    /// A template file, relative to the task file.
    File(String),
}

impl fmt::Display for TemplateRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateRef::Auto => f.write_str("auto"),
            TemplateRef::Builtin(n) => write!(f, "builtin:{n}"),
            TemplateRef::File(p) => f.write_str(p),
        }
    }
}

impl TemplateRef {
    pub fn parse(s: &str) -> TemplateRef {
        let s = s.trim();
        if s.eq_ignore_ascii_case("auto") {
            TemplateRef::Auto
        } else if let Some(n) = s.strip_prefix("builtin:") {
            TemplateRef::Builtin(n.to_ascii_lowercase())
        } else {
            TemplateRef::File(s.to_string())
        }
    }
}

/// Text of the template files shipped with the library.
pub fn builtin_template_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "eca" => include_str!("../../data/templates/eca.tmpl"),
        "seek_whence" => include_str!("../../data/templates/seek_whence.tmpl"),
        "rhythm" => include_str!("../../data/templates/rhythm.tmpl"),
        "binding" => include_str!("../../data/templates/binding.tmpl"),
        "occlusion" => include_str!("../../data/templates/occlusion.tmpl"),
        "ex2" => include_str!("../../data/templates/ex2.tmpl"),
        _ => return None,
    })
}

pub const BUILTIN_TEMPLATES: [&str; 6] = ["eca", "seek_whence", "rhythm", "binding", "occlusion", "ex2"];

/// Weight bound used when a task asks for `auto` templates.
pub const AUTO_MAX_WEIGHT: usize = 3;

/// The unit of evaluation: what the engine sees, what it must recover, and
/// the knowledge it is given.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApperceptionTask {
    /// Sensor objects and predicates, plus those of the background facts.
    pub signature: TypeSignature,
    pub visible: SensorySequence,
    /// Held-out atoms with their 1-based time.
    pub hidden: BTreeSet<(usize, Atom)>,
    pub background: BTreeSet<Atom>,
    pub templates: TemplateRef,
    pub kind: TaskKind,
}

impl ApperceptionTask {
    /// Splits a complete sequence: `hidden` atoms are removed from the
    /// visible part, which keeps the full length.
    pub fn from_truth(
        signature: TypeSignature,
        truth: &SensorySequence,
        hidden: BTreeSet<(usize, Atom)>,
        background: BTreeSet<Atom>,
        templates: TemplateRef,
        kind: TaskKind,
    ) -> ApperceptionTask {
        let mut visible = truth.clone();
        for (t, a) in &hidden {
            visible.steps[t - 1].remove(a);
        }
        ApperceptionTask {
            signature,
            visible,
            hidden,
            background,
            templates,
            kind,
        }
    }

    pub fn len(&self) -> usize {
        self.visible.len()
    }

    pub fn is_empty(&self) -> bool {
        self.visible.is_empty()
    }

    /// Visible and hidden atoms together.
    pub fn truth(&self) -> SensorySequence {
        let mut s = self.visible.clone();
        for (t, a) in &self.hidden {
            s.steps[t - 1].insert(a.clone());
        }
        s
    }

    pub fn hidden_at(&self, t: usize) -> impl Iterator<Item = &Atom> {
        self.hidden.iter().filter(move |(u, _)| *u == t).map(|(_, a)| a)
    }

    pub fn problem(&self) -> Problem {
        Problem {
            signature: self.signature.clone(),
            sequence: self.visible.clone(),
            facts: self.background.clone(),
        }
    }

    pub fn validate(&self) -> Result<(), LangError> {
        self.signature.validate()?;
        self.visible.validate(&self.signature)?;
        for a in &self.background {
            self.signature.check_ground(a)?;
        }
        for (t, a) in &self.hidden {
            self.signature.check_ground(a)?;
            if *t == 0 || *t > self.visible.len() {
                return Err(LangError::Invalid(format!("hidden atom {a} at step {t} is outside the sequence")));
            }
            if self.visible.at(*t).contains(a) {
                return Err(LangError::Invalid(format!("{a} is both visible and hidden at step {t}")));
            }
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<ApperceptionTask, LangError> {
        let doc = Document::parse(text)?;
        let signature = doc.signature()?;
        let mut kind = TaskKind::Prediction;
        let mut templates = TemplateRef::Auto;
        let mut background = BTreeSet::new();
        for (l, it) in &doc.items {
            match it {
                Item::Type(_) | Item::Object(..) | Item::Pred(..) | Item::Var(..) | Item::At(..) | Item::Hidden(..) => {}
                Item::Kind(k) => kind = k.parse()?,
                Item::TemplateRef(r) => templates = TemplateRef::parse(r),
                Item::Fact(a) => {
                    background.insert(a.clone());
                }
                _ => {
                    return Err(LangError::Parse {
                        line: *l,
                        msg: "item not allowed in a task".into(),
                    })
                }
            }
        }
        let mut visible = doc.sequence(Some(&signature))?;
        let hidden_seq = doc.hidden(Some(&signature))?;
        if visible.len() < hidden_seq.len() {
            visible.steps.resize(hidden_seq.len(), BTreeSet::new());
        }
        let hidden = hidden_seq
            .steps
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |a| (i + 1, a.clone())))
            .collect();
        let task = ApperceptionTask {
            signature,
            visible,
            hidden,
            background,
            templates,
            kind,
        };
        task.validate()?;
        Ok(task)
    }

    /// Resolves the template reference; files are relative to `base`.
    pub fn template_source(&self, base: Option<&Path>) -> Result<TemplateSource, LangError> {
        let text;
        let src = match &self.templates {
            TemplateRef::Auto => {
                return Ok(TemplateSource::DomainIndependent {
                    max_weight: AUTO_MAX_WEIGHT,
                })
            }
            TemplateRef::Builtin(n) => builtin_template_text(n)
                .ok_or_else(|| LangError::Invalid(format!("no built-in template `{n}`")))?,
            TemplateRef::File(p) => {
                let path = match base {
                    Some(b) => b.join(p),
                    None => Path::new(p).to_path_buf(),
                };
                text = std::fs::read_to_string(&path)
                    .map_err(|e| LangError::Invalid(format!("cannot read {}: {e}", path.display())))?;
                &text
            }
        };
        Ok(TemplateSource::Explicit(parse_templates(src)?))
    }
}

impl fmt::Display for ApperceptionTask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "kind {}", self.kind)?;
        writeln!(f, "template {}", self.templates)?;
        write!(f, "{}", self.signature)?;
        for a in &self.background {
            writeln!(f, "fact {a}")?;
        }
        write!(f, "{}", self.visible)?;
        for t in 1..=self.visible.len() {
            let h: BTreeSet<Atom> = self.hidden_at(t).cloned().collect();
            if !h.is_empty() {
                write_state(f, "hidden", t, &h)?;
            }
        }
        Ok(())
    }
}

/// Chooses the held-out atoms: the last step, the first step, or a seeded
/// uniform sample of as many atoms as the last step holds.
pub fn hold_out(truth: &SensorySequence, kind: TaskKind, seed: u64) -> BTreeSet<(usize, Atom)> {
    let n = truth.len();
    match kind {
        TaskKind::Prediction => hide_steps(truth, &[n]),
        TaskKind::Retrodiction => hide_steps(truth, &[1]),
        TaskKind::Imputation => {
            let all: Vec<(usize, Atom)> = (1..=n).flat_map(|t| truth.at(t).iter().map(move |a| (t, a.clone()))).collect();
            let k = truth.at(n).len().min(all.len());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rand::seq::index::sample(&mut rng, all.len(), k)
                .into_iter()
                .map(|i| all[i].clone())
                .collect()
        }
    }
}

/// Hides every atom of the chosen steps.
pub fn hide_steps(truth: &SensorySequence, steps: &[usize]) -> BTreeSet<(usize, Atom)> {
    steps
        .iter()
        .flat_map(|&t| truth.at(t).iter().map(move |a| (t, a.clone())))
        .collect()
}

/// Helper for generators: a signature with one type and named objects.
pub(crate) fn typed_objects(sig: &mut TypeSignature, ty: &str, names: &[String]) {
    if !sig.types.contains(ty) {
        sig.add_type(ty).expect("fresh type");
    }
    for n in names {
        sig.add_object(n, ty).expect("fresh object");
    }
}

/// The templates a task would use, already merged with its signature.
pub fn task_templates(task: &ApperceptionTask, base: Option<&Path>) -> Result<Vec<Template>, LangError> {
    crate::synth::enumerate_templates(&task.template_source(base)?, &task.problem())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn task_text_round_trips() {
        let task = eca::eca_task(110, &eca::parse_bits("0100").unwrap(), 5, TaskKind::Prediction, 0);
        let text = task.to_string();
        let back = ApperceptionTask::parse(&text).unwrap();
        assert_eq!(back, task);
        assert_eq!(back.to_string(), text);
    }

    #[test]
    fn every_builtin_template_parses() {
        for n in BUILTIN_TEMPLATES {
            let ts = parse_templates(builtin_template_text(n).unwrap()).unwrap();
            assert!(!ts.is_empty(), "{n}");
        }
    }

    #[test]
    fn hidden_atoms_must_not_be_visible() {
        let text = "type s\nobject a s\npred on(s)\nat 1 { on(a) }\nhidden 1 { on(a) }\n";
        assert!(ApperceptionTask::parse(text).is_err());
    }
}
