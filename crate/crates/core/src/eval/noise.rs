//! Mislabelled letter sequences: exact search against the noise-tolerant
//! objective, scored on predicting the last letter.

use std::collections::BTreeSet;
use std::io::Write;
use std::time::Duration;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{score, EvalError};
use crate::domains::{hide_steps, ApperceptionTask, TaskKind, TemplateRef};
use crate::lang::{parse_templates, Atom, SensorySequence, Template, TypeSignature};
use crate::synth::templates::invent;
use crate::synth::{apperceive, Budget, Mode, SearchConfig, TemplateSource};

/// Ten short periodic patterns, repeated to the requested length.
pub const NOISE_PATTERNS: [&str; 10] = ["ab", "aab", "aabb", "aaab", "abba", "abc", "abcba", "abac", "abcc", "aabbcc"];

pub const SENSOR: &str = "s";

pub fn letter_pred(c: char) -> String {
    format!("l{c}")
}

/// The letters of `letters` in first-seen order.
pub fn alphabet(letters: &str) -> Vec<char> {
    let mut out = Vec::new();
    for c in letters.chars() {
        if !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// One sensor; each letter is a unary predicate on it.
pub fn letter_signature(alphabet: &[char]) -> TypeSignature {
    let mut sig = TypeSignature::new();
    sig.add_type("sensor").unwrap();
    sig.add_object(SENSOR, "sensor").unwrap();
    for &c in alphabet {
        sig.add_pred(&letter_pred(c), &["sensor"]).unwrap();
    }
    sig
}

pub fn letter_sequence(letters: &str) -> SensorySequence {
    SensorySequence::new(
        letters
            .chars()
            .map(|c| BTreeSet::from([Atom::unary(&letter_pred(c), SENSOR)]))
            .collect(),
    )
}

/// `pattern` repeated and cut to `len` letters.
pub fn extend_pattern(pattern: &str, len: usize) -> String {
    pattern.chars().cycle().take(len).collect()
}

/// Replaces `count` letters among the first `len - 1` with a different
/// letter of `alphabet`. Returns the new string and the 1-based positions.
pub fn mislabel(letters: &str, alphabet: &[char], count: usize, rng: &mut impl Rng) -> (String, Vec<usize>) {
    let mut chars: Vec<char> = letters.chars().collect();
    let open = chars.len().saturating_sub(1);
    if alphabet.len() < 2 || open == 0 {
        return (letters.to_string(), Vec::new());
    }
    let mut picked: Vec<usize> = sample(rng, open, count.min(open)).into_vec();
    picked.sort_unstable();
    for &i in &picked {
        let others: Vec<char> = alphabet.iter().copied().filter(|&c| c != chars[i]).collect();
        chars[i] = others[rng.gen_range(0..others.len())];
    }
    (chars.into_iter().collect(), picked.into_iter().map(|i| i + 1).collect())
}

/// Letter cycles first, then up to `max_latent` states of an invented
/// clock object. Putting the states on their own type keeps the letters in
/// one exclusion group of their own.
pub fn letter_templates(alphabet: &[char], max_latent: usize) -> Vec<Template> {
    let sig = letter_signature(alphabet);
    let mut out = vec![invent(&sig, 0, 0, 0, 0, alphabet.len(), 1).unwrap()];
    for k in 2..=max_latent {
        let mut text = String::from("type sensor\ntype clock\nobject clk clock\n");
        for &c in alphabet {
            text += &format!("pred {}(sensor)\n", letter_pred(c));
        }
        for i in 1..=k {
            text += &format!("pred p{i}(clock)\n");
        }
        text += "pred at(clock,sensor)\npermanent at\nvar X sensor\nvar T clock\n";
        text += &format!("static {k}\ncausal {k}\nbody 2\n");
        out.extend(parse_templates(&text).expect("generated template"));
    }
    out
}

/// Prediction task over a possibly corrupted sequence whose last letter is
/// held out. The held-out letter is taken from `clean`.
pub fn letter_task(clean: &str, noisy: &str) -> ApperceptionTask {
    let letters = alphabet(clean);
    let mut truth = letter_sequence(noisy);
    let last = truth.len();
    truth.steps[last - 1] = letter_sequence(clean).steps[last - 1].clone();
    let hidden = hide_steps(&truth, &[last]);
    ApperceptionTask::from_truth(
        letter_signature(&letters),
        &truth,
        hidden,
        BTreeSet::new(),
        TemplateRef::Auto,
        TaskKind::Prediction,
    )
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub patterns: Vec<String>,
    pub length: usize,
    /// Percentages of the visible letters to mislabel.
    pub percents: Vec<usize>,
    /// Corruptions per (pattern, percentage).
    pub repeats: usize,
    pub max_latent: usize,
    pub time_limit: Option<Duration>,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            patterns: NOISE_PATTERNS.iter().map(|s| s.to_string()).collect(),
            length: 30,
            percents: vec![0, 10, 20, 30, 40, 50],
            repeats: 1,
            max_latent: 4,
            time_limit: Some(Duration::from_secs(60)),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub mode: Mode,
    pub percent: usize,
    pub runs: usize,
    pub accuracy: f64,
}

fn mode_name(m: Mode) -> &'static str {
    match m {
        Mode::Exact => "exact",
        Mode::Noise => "noise",
    }
}

/// Whether the engine predicts the held-out letter under `mode`.
pub fn predicts_last(task: &ApperceptionTask, templates: &[Template], mode: Mode, time_limit: Option<Duration>) -> bool {
    let cfg = SearchConfig {
        mode,
        budget: Budget {
            time_limit,
            node_limit: None,
        },
        ..SearchConfig::default()
    };
    let Ok(r) = apperceive(&task.problem(), &TemplateSource::Explicit(templates.to_vec()), &cfg) else {
        return false;
    };
    let Some((th, _)) = r.best else {
        return false;
    };
    match crate::trace::trace(&th, task.len()) {
        Ok(tr) => score(task, &tr.states) == task.hidden.len(),
        Err(_) => false,
    }
}

/// Mean accuracy per (mode, percentage). Every corruption is seeded from
/// `seed`, the pattern index, the percentage and the repeat.
pub fn noise_sweep(config: &SweepConfig) -> Vec<SweepPoint> {
    let mut out = Vec::new();
    for &pct in &config.percents {
        let mut hits = [0usize; 2];
        let mut runs = 0;
        for (pi, pattern) in config.patterns.iter().enumerate() {
            let clean = extend_pattern(pattern, config.length);
            let letters = alphabet(&clean);
            let templates = letter_templates(&letters, config.max_latent);
            let count = (pct * config.length.saturating_sub(1) + 50) / 100;
            for rep in 0..config.repeats {
                let seed = config.seed ^ ((pi as u64) << 32) ^ ((pct as u64) << 16) ^ rep as u64;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let (noisy, _) = mislabel(&clean, &letters, count, &mut rng);
                let task = letter_task(&clean, &noisy);
                for (i, mode) in [Mode::Exact, Mode::Noise].into_iter().enumerate() {
                    hits[i] += predicts_last(&task, &templates, mode, config.time_limit) as usize;
                }
                runs += 1;
            }
        }
        for (i, mode) in [Mode::Exact, Mode::Noise].into_iter().enumerate() {
            out.push(SweepPoint {
                mode,
                percent: pct,
                runs,
                accuracy: if runs == 0 { 0.0 } else { hits[i] as f64 / runs as f64 },
            });
        }
    }
    out
}

pub fn write_sweep(out: impl Write, points: &[SweepPoint]) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["mode", "mislabel_percent", "runs", "accuracy"])?;
    for p in points {
        w.write_record([
            mode_name(p.mode).to_string(),
            p.percent.to_string(),
            p.runs.to_string(),
            format!("{:.4}", p.accuracy),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_extend_cyclically() {
        assert_eq!(extend_pattern("abc", 7), "abcabca");
        assert_eq!(alphabet("abcba"), ['a', 'b', 'c']);
    }

    #[test]
    fn mislabel_changes_exactly_the_reported_positions() {
        let clean = extend_pattern("ab", 30);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (noisy, pos) = mislabel(&clean, &['a', 'b'], 4, &mut rng);
        assert_eq!(pos.len(), 4);
        let diff: Vec<usize> = clean
            .chars()
            .zip(noisy.chars())
            .enumerate()
            .filter(|(_, (x, y))| x != y)
            .map(|(i, _)| i + 1)
            .collect();
        assert_eq!(diff, pos);
        assert!(pos.iter().all(|&p| p < 30));
    }

    #[test]
    fn noise_mode_needs_a_longer_sequence() {
        let ts = letter_templates(&['a', 'b'], 0);
        let short = extend_pattern("ab", 10);
        let task = letter_task(&short, &short);
        assert!(predicts_last(&task, &ts, Mode::Exact, None));
        // One init plus four unexplained letters is cheaper than the rules.
        assert!(!predicts_last(&task, &ts, Mode::Noise, None));
        let long = extend_pattern("ab", 30);
        let task = letter_task(&long, &long);
        assert!(predicts_last(&task, &ts, Mode::Exact, None));
        assert!(predicts_last(&task, &ts, Mode::Noise, None));
    }

    #[test]
    fn sweep_rows_per_mode_and_percentage() {
        let cfg = SweepConfig {
            patterns: vec!["ab".into()],
            length: 12,
            percents: vec![0, 10],
            max_latent: 0,
            ..SweepConfig::default()
        };
        let pts = noise_sweep(&cfg);
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[0].accuracy, 1.0);
        assert_eq!(pts[1].accuracy, 1.0);
        let mut buf = Vec::new();
        write_sweep(&mut buf, &pts).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("mode,mislabel_percent"));
    }
}
