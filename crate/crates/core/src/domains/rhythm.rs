//! Rhythms and tunes: one loudness sensor per note or drum. A press sets the
//! sensor to 3, after which it decays by one level per step down to 0.

use std::collections::BTreeSet;

use super::{hold_out, typed_objects, ApperceptionTask, TaskKind, TemplateRef};
use crate::lang::{Atom, LangError, SensorySequence, TypeSignature};

pub const MAX_LOUDNESS: usize = 3;
pub const STEPS_PER_BAR: usize = 8;

/// Sensors of the tune tasks, low to high.
pub const TUNE_NOTES: [&str; 8] = ["sc", "sd", "se", "sf", "sg", "sa", "sb", "shc"];
/// Sensors of the rhythm tasks.
pub const DRUMS: [&str; 3] = ["sbass", "ssnare", "shihat"];

/// Opening two bars of Twinkle Twinkle: C C G G A A G(half).
pub const TWINKLE: [(usize, &str); 7] = [(1, "sc"), (3, "sc"), (5, "sg"), (7, "sg"), (9, "sa"), (11, "sa"), (13, "sg")];

pub fn level(n: usize) -> String {
    format!("n{n}")
}

/// A press or a silent step for one sensor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NoteEvent {
    pub time: usize,
    pub sensor: String,
    pub pressed: bool,
}

impl NoteEvent {
    pub fn press(time: usize, sensor: &str) -> NoteEvent {
        NoteEvent {
            time,
            sensor: sensor.to_string(),
            pressed: true,
        }
    }
}

pub fn rhythm_signature(sensors: &[&str]) -> TypeSignature {
    let mut sig = TypeSignature::new();
    let names: Vec<String> = sensors.iter().map(|s| s.to_string()).collect();
    typed_objects(&mut sig, "sensor", &names);
    let levels: Vec<String> = (0..=MAX_LOUDNESS).map(level).collect();
    typed_objects(&mut sig, "loudness", &levels);
    sig.add_pred("v", &["sensor", "loudness"]).unwrap();
    sig.add_pred("succ", &["loudness", "loudness"]).unwrap();
    sig.add_pred("r", &["sensor", "sensor"]).unwrap();
    sig.add_pred("max", &["loudness"]).unwrap();
    sig.add_pred("min", &["loudness"]).unwrap();
    sig
}

/// Successor, extremes of loudness and the chain of neighbouring sensors.
pub fn rhythm_background(sensors: &[&str]) -> BTreeSet<Atom> {
    let mut out: BTreeSet<Atom> = (0..MAX_LOUDNESS)
        .map(|i| Atom::binary("succ", &level(i), &level(i + 1)))
        .collect();
    out.insert(Atom::unary("max", &level(MAX_LOUDNESS)));
    out.insert(Atom::unary("min", &level(0)));
    for w in sensors.windows(2) {
        out.insert(Atom::binary("r", w[0], w[1]));
    }
    out
}

/// Loudness of every sensor over `steps` steps.
pub fn loudness(sensors: &[&str], steps: usize, events: &[NoteEvent]) -> Result<Vec<Vec<usize>>, LangError> {
    for e in events {
        if !sensors.contains(&e.sensor.as_str()) {
            return Err(LangError::Invalid(format!("unknown sensor `{}`", e.sensor)));
        }
        if e.time == 0 || e.time > steps {
            return Err(LangError::Invalid(format!("event time {} outside 1..{steps}", e.time)));
        }
    }
    let mut out: Vec<Vec<usize>> = Vec::with_capacity(steps);
    let mut cur = vec![0usize; sensors.len()];
    for t in 1..=steps {
        for (i, s) in sensors.iter().enumerate() {
            let pressed = events.iter().any(|e| e.time == t && e.sensor == *s && e.pressed);
            cur[i] = if pressed { MAX_LOUDNESS } else { cur[i].saturating_sub(1) };
        }
        out.push(cur.clone());
    }
    Ok(out)
}

pub fn rhythm_sequence(sensors: &[&str], steps: usize, events: &[NoteEvent]) -> Result<SensorySequence, LangError> {
    let levels = loudness(sensors, steps, events)?;
    Ok(SensorySequence::new(
        levels
            .iter()
            .map(|row| {
                row.iter()
                    .zip(sensors)
                    .map(|(&l, s)| Atom::binary("v", s, &level(l)))
                    .collect()
            })
            .collect(),
    ))
}

pub fn rhythm_tune_task(sensors: &[&str], steps: usize, events: &[NoteEvent]) -> Result<ApperceptionTask, LangError> {
    rhythm_tune_task_kind(sensors, steps, events, TaskKind::Prediction, 0)
}

pub fn rhythm_tune_task_kind(
    sensors: &[&str],
    steps: usize,
    events: &[NoteEvent],
    kind: TaskKind,
    seed: u64,
) -> Result<ApperceptionTask, LangError> {
    let truth = rhythm_sequence(sensors, steps, events)?;
    let hidden = hold_out(&truth, kind, seed);
    Ok(ApperceptionTask::from_truth(
        rhythm_signature(sensors),
        &truth,
        hidden,
        rhythm_background(sensors),
        TemplateRef::Builtin("rhythm".into()),
        kind,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn value(seq: &SensorySequence, t: usize, s: &str) -> String {
        seq.at(t)
            .iter()
            .find(|a| a.args[0] == s)
            .map(|a| a.args[1].clone())
            .unwrap()
    }

    #[test]
    fn twinkle_opening() {
        let ev: Vec<NoteEvent> = TWINKLE.iter().map(|&(t, s)| NoteEvent::press(t, s)).collect();
        let seq = rhythm_sequence(&TUNE_NOTES, 16, &ev).unwrap();
        let c: Vec<String> = (1..=6).map(|t| value(&seq, t, "sc")).collect();
        let g: Vec<String> = (1..=6).map(|t| value(&seq, t, "sg")).collect();
        assert_eq!(c, ["n3", "n2", "n3", "n2", "n1", "n0"]);
        assert_eq!(g, ["n0", "n0", "n0", "n0", "n3", "n2"]);
        assert!(seq.steps.iter().all(|s| s.len() == 8));
    }

    #[test]
    fn silence_is_zero() {
        let seq = rhythm_sequence(&DRUMS, 4, &[]).unwrap();
        assert!(seq.steps.iter().flatten().all(|a| a.args[1] == "n0"));
    }

    #[test]
    fn repress_restarts_decay() {
        let ev = [NoteEvent::press(1, "sbass"), NoteEvent::press(2, "sbass")];
        let seq = rhythm_sequence(&DRUMS, 5, &ev).unwrap();
        let got: Vec<String> = (1..=5).map(|t| value(&seq, t, "sbass")).collect();
        assert_eq!(got, ["n3", "n3", "n2", "n1", "n0"]);
    }
}
