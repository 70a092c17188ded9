use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Answer, GoldEntry};

/// Answer-string normalization applied before comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Normalization {
    pub lowercase: bool,
    /// Drop ASCII punctuation characters.
    pub strip_punctuation: bool,
    /// Drop the tokens "a", "an" and "the".
    pub strip_articles: bool,
}

impl Normalization {
    /// The conventional SQuAD-style answer normalization.
    pub const STANDARD: Normalization = Normalization { lowercase: true, strip_punctuation: true, strip_articles: true };
    /// Whitespace tokenization only.
    pub const RAW: Normalization = Normalization { lowercase: false, strip_punctuation: false, strip_articles: false };
}

impl Default for Normalization {
    fn default() -> Self {
        Normalization::STANDARD
    }
}

pub fn answer_tokens(s: &str, n: Normalization) -> Vec<String> {
    let mut text: String = if n.strip_punctuation {
        s.chars().filter(|c| !c.is_ascii_punctuation()).collect()
    } else {
        s.to_string()
    };
    if n.lowercase {
        text = text.to_lowercase();
    }
    text.split_whitespace()
        .filter(|t| !(n.strip_articles && matches!(*t, "a" | "an" | "the")))
        .map(str::to_string)
        .collect()
}

pub fn normalize_answer(s: &str, n: Normalization) -> String {
    answer_tokens(s, n).join(" ")
}

pub fn exact_match(pred: &str, gold: &str) -> u8 {
    exact_match_with(pred, gold, Normalization::STANDARD)
}

pub fn exact_match_with(pred: &str, gold: &str, n: Normalization) -> u8 {
    u8::from(normalize_answer(pred, n) == normalize_answer(gold, n))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_pr(precision: f64, recall: f64) -> Self {
        Prf { precision, recall, f1: harmonic(precision, recall) }
    }
}

pub fn harmonic(a: f64, b: f64) -> f64 {
    if a + b == 0.0 {
        0.0
    } else {
        2.0 * a * b / (a + b)
    }
}

pub fn token_f1(pred: &str, gold: &str) -> Prf {
    token_f1_with(pred, gold, Normalization::STANDARD)
}

/// Multiset token overlap. All three values are 0 when either side has no
/// tokens.
pub fn token_f1_with(pred: &str, gold: &str, n: Normalization) -> Prf {
    let p = answer_tokens(pred, n);
    let g = answer_tokens(gold, n);
    if p.is_empty() || g.is_empty() {
        return Prf::default();
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in &g {
        *counts.entry(t).or_insert(0) += 1;
    }
    let mut overlap = 0;
    for t in &p {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    if overlap == 0 {
        return Prf::default();
    }
    Prf::from_pr(overlap as f64 / p.len() as f64, overlap as f64 / g.len() as f64)
}

/// Best exact match and best-F1 scores against several references.
pub fn best_over_golds<'a>(pred: &str, golds: impl IntoIterator<Item = &'a str>, n: Normalization) -> (u8, Prf) {
    let mut em = 0;
    let mut best = Prf::default();
    for g in golds {
        em = em.max(exact_match_with(pred, g, n));
        let s = token_f1_with(pred, g, n);
        if s.f1 > best.f1 {
            best = s;
        }
    }
    (em, best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregateF1 {
    /// Average of per-instance F1 scores.
    pub mean_f1: f64,
    /// Harmonic mean of the averaged precision and averaged recall.
    pub macro_f1: f64,
}

#[derive(Debug, Clone, Copy, Error, PartialEq, Eq)]
#[error("cannot aggregate an empty list of scores")]
pub struct EmptyScores;

pub fn aggregate_f1(scores: &[Prf]) -> Result<AggregateF1, EmptyScores> {
    if scores.is_empty() {
        return Err(EmptyScores);
    }
    let n = scores.len() as f64;
    let p = scores.iter().map(|s| s.precision).sum::<f64>() / n;
    let r = scores.iter().map(|s| s.recall).sum::<f64>() / n;
    let mean_f1 = scores.iter().map(|s| harmonic(s.precision, s.recall)).sum::<f64>() / n;
    Ok(AggregateF1 { mean_f1, macro_f1: harmonic(p, r) })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PredictedAnswer {
    Text { text: String },
    Choices { choices: BTreeSet<usize> },
    /// The system declines to answer.
    Abstain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub entry_id: String,
    pub answer: PredictedAnswer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionScores {
    pub scored: usize,
    pub exact_match: f64,
    pub f1: AggregateF1,
    /// Predictions whose entry was not found.
    pub unknown: Vec<String>,
}

fn score_one(entry: &GoldEntry, answer: &PredictedAnswer, n: Normalization) -> (u8, Prf) {
    let unanswerable = entry.answers.iter().any(|a| matches!(a, Answer::Unanswerable));
    match answer {
        PredictedAnswer::Abstain => {
            if unanswerable {
                (1, Prf { precision: 1.0, recall: 1.0, f1: 1.0 })
            } else {
                (0, Prf::default())
            }
        }
        PredictedAnswer::Choices { choices } => {
            let mut best = (0, Prf::default());
            for a in &entry.answers {
                if let Answer::MultipleChoice { correct, .. } = a {
                    let gold: BTreeSet<usize> = correct.iter().copied().collect();
                    let tp = choices.intersection(&gold).count() as f64;
                    let ratio = |d: usize| if d == 0 { 0.0 } else { tp / d as f64 };
                    let s = Prf::from_pr(ratio(choices.len()), ratio(gold.len()));
                    let em = u8::from(*choices == gold);
                    if (em, s.f1) > (best.0, best.1.f1) {
                        best = (em, s);
                    }
                }
            }
            best
        }
        PredictedAnswer::Text { text } => {
            best_over_golds(text, entry.answers.iter().flat_map(Answer::gold_texts), n)
        }
    }
}

/// Scores predictions against entries: EM as a fraction, F1 both ways.
/// Multiple gold answers are scored separately and the best is kept. A
/// prediction that abstains on an unanswerable entry counts as exact.
pub fn score_predictions(
    entries: &[GoldEntry],
    predictions: &[Prediction],
    n: Normalization,
) -> Result<PredictionScores, EmptyScores> {
    let by_id: BTreeMap<&str, &GoldEntry> = entries.iter().map(|e| (e.id.as_str(), e)).collect();
    let mut unknown = Vec::new();
    let mut em = 0usize;
    let mut scores = Vec::new();
    for p in predictions {
        match by_id.get(p.entry_id.as_str()) {
            None => unknown.push(p.entry_id.clone()),
            Some(e) => {
                let (m, s) = score_one(e, &p.answer, n);
                em += usize::from(m);
                scores.push(s);
            }
        }
    }
    let f1 = aggregate_f1(&scores)?;
    Ok(PredictionScores { scored: scores.len(), exact_match: em as f64 / scores.len() as f64, f1, unknown })
}
