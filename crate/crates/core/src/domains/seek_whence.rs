//! Letter-sequence induction: one sensor reads one letter per step, and the
//! successor relation on letters is given.

use std::collections::BTreeSet;

use super::{hold_out, typed_objects, ApperceptionTask, TaskKind, TemplateRef};
use crate::lang::{Atom, LangError, SensorySequence, TypeSignature};

pub const LETTERS: &str = "abcdef";

/// The thirty sequences of the benchmark figure, in reading order.
pub const SEQUENCES: [&str; 30] = [
    "aababcabcda",
    "abcde",
    "babbbbbcbbdbbe",
    "abbcccdddde",
    "afefafefafefa",
    "babbbcbdbe",
    "abbccddee",
    "abccddeeefff",
    "fafbfcfdf",
    "afeefaafeefaa",
    "bbbccbbbccbbbcc",
    "baabbbaaaabbbbb",
    "bcacacbdbdbcaca",
    "abbccddeeff",
    "aababcabcdabcde",
    "bacabdabceabcdf",
    "abacbadcbaedcb",
    "cbabcbabcbabcb",
    "aaabbceff",
    "aababcbaabcdcb",
    "aabcabbcabccaaa",
    "ababababa",
    "acbdced",
    "acfbead",
    "aaffeedd",
    "aaabbbcc",
    "aabbfabbeabbd",
    "fadabafadaba",
    "abafaaefa",
    "bafbaebad",
];

pub fn letter(c: char) -> String {
    format!("l{c}")
}

pub fn sw_signature() -> TypeSignature {
    let mut sig = TypeSignature::new();
    typed_objects(&mut sig, "sensor", &["s".to_string()]);
    let letters: Vec<String> = LETTERS.chars().map(letter).collect();
    typed_objects(&mut sig, "letter", &letters);
    sig.add_pred("value", &["sensor", "letter"]).unwrap();
    sig.add_pred("succ", &["letter", "letter"]).unwrap();
    sig
}

pub fn successor_facts() -> BTreeSet<Atom> {
    let ls: Vec<char> = LETTERS.chars().collect();
    ls.windows(2)
        .map(|w| Atom::binary("succ", &letter(w[0]), &letter(w[1])))
        .collect()
}

pub fn sw_sequence(letters: &str) -> Result<SensorySequence, LangError> {
    letters
        .chars()
        .map(|c| {
            if LETTERS.contains(c) {
                Ok(BTreeSet::from([Atom::binary("value", "s", &letter(c))]))
            } else {
                Err(LangError::Invalid(format!("letter `{c}` is outside a-f")))
            }
        })
        .collect::<Result<Vec<_>, _>>()
        .map(SensorySequence::new)
}

/// Prediction task over `letters`: the last letter is held out.
pub fn seek_whence_task(letters: &str) -> Result<ApperceptionTask, LangError> {
    seek_whence_task_kind(letters, TaskKind::Prediction, 0)
}

pub fn seek_whence_task_kind(letters: &str, kind: TaskKind, seed: u64) -> Result<ApperceptionTask, LangError> {
    if letters.is_empty() {
        return Err(LangError::Invalid("empty letter sequence".into()));
    }
    let truth = sw_sequence(letters)?;
    let hidden = hold_out(&truth, kind, seed);
    Ok(ApperceptionTask::from_truth(
        sw_signature(),
        &truth,
        hidden,
        successor_facts(),
        TemplateRef::Builtin("seek_whence".into()),
        kind,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn theme_song_states() {
        let t = seek_whence_task("babbbbbcbbdbbebb").unwrap();
        assert_eq!(t.len(), 16);
        assert_eq!(t.visible.at(1), &BTreeSet::from([Atom::binary("value", "s", "lb")]));
        assert_eq!(t.visible.at(2), &BTreeSet::from([Atom::binary("value", "s", "la")]));
        assert!(t.visible.at(16).is_empty());
        assert_eq!(t.hidden_at(16).count(), 1);
    }

    #[test]
    fn single_letter_task() {
        let t = seek_whence_task("a").unwrap();
        assert_eq!(t.len(), 1);
        assert_eq!(t.hidden.len(), 1);
    }

    #[test]
    fn all_thirty_sequences_load() {
        for s in SEQUENCES {
            seek_whence_task(s).unwrap().validate().unwrap();
        }
    }

    #[test]
    fn other_letters_are_rejected() {
        assert!(seek_whence_task("abz").is_err());
    }
}
