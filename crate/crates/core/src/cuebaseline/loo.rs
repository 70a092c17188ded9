use std::collections::{BTreeMap, BTreeSet, HashSet};

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

use super::model::{fit_matrix, FitConfig, FitError, LabeledInstance, DIM};
use crate::ingest::{Dataset, GoldEntry, SentenceRef};
use crate::schema::AnnotationRecord;
use crate::textlex::{tokenize_with, ContextIndex, FeatureConfig, FeatureVector, TokenizerConfig};

/// A gold entry together with the supporting facts an annotator marked.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedEntry {
    pub entry: GoldEntry,
    pub supporting_facts: BTreeSet<SentenceRef>,
}

impl AnnotatedEntry {
    /// Pairs entries with records by id. When `annotator` is `None` the
    /// first record seen for an entry is used. Entries without a record are
    /// dropped.
    pub fn pair(entries: &[GoldEntry], records: &[AnnotationRecord], annotator: Option<&str>) -> Vec<Self> {
        let mut facts: BTreeMap<&str, &BTreeSet<SentenceRef>> = BTreeMap::new();
        for r in records {
            if annotator.is_some_and(|a| a != r.annotator_id) {
                continue;
            }
            facts.entry(r.entry_id.as_str()).or_insert(&r.supporting_facts);
        }
        entries
            .iter()
            .filter_map(|e| {
                facts.get(e.id.as_str()).map(|f| AnnotatedEntry { entry: e.clone(), supporting_facts: (*f).clone() })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub fit: FitConfig,
    pub runs: usize,
    pub tokenizer: TokenizerConfig,
    pub features: FeatureConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            fit: FitConfig::default(),
            runs: 5,
            tokenizer: TokenizerConfig::default(),
            features: FeatureConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrfScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl PrfScore {
    /// Scores a predicted sentence set against the gold set. Precision is 0
    /// when nothing is predicted.
    pub fn from_counts(tp: usize, predicted: usize, gold: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(tp, predicted);
        let recall = ratio(tp, gold);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        PrfScore { precision, recall, f1 }
    }
}

/// Mean over runs of the per-entry averaged scores, with 95% confidence
/// half-widths across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub precision_half_width: f64,
    pub recall_half_width: f64,
    pub f1_half_width: f64,
    pub runs: Vec<PrfScore>,
    /// Entries that were held out and scored.
    pub evaluated: usize,
    /// Entries without supporting facts: used for training, never scored.
    pub excluded: Vec<String>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("leave-one-out needs at least 2 entries, got {0}")]
    TooFew(usize),
    #[error("at least one run is required")]
    NoRuns,
    #[error("entry `{0}` appears more than once")]
    DuplicateEntry(String),
    #[error("entry `{entry}`: supporting fact {fact} does not exist")]
    DanglingFact { entry: String, fact: SentenceRef },
    #[error("no entry has supporting facts to evaluate")]
    NothingToEvaluate,
    #[error("fold holding out `{entry}`: {source}")]
    Fit { entry: String, source: FitError },
}

/// Per-sentence features and labels of one entry, in global sentence order.
#[derive(Debug, Clone, PartialEq)]
pub struct EntryDesign {
    pub entry_id: String,
    pub x: Vec<[f64; DIM]>,
    pub y: Vec<bool>,
}

impl EntryDesign {
    pub fn positives(&self) -> usize {
        self.y.iter().filter(|&&v| v).count()
    }
}

pub fn entry_features(entry: &GoldEntry, tokenizer: TokenizerConfig, features: FeatureConfig) -> Vec<FeatureVector> {
    let question = tokenize_with(&entry.question, tokenizer);
    let sentences = entry.context_sentences(tokenizer);
    ContextIndex::new(&question, &sentences, features).all()
}

pub fn instances(a: &AnnotatedEntry, config: &EvalConfig) -> Result<Vec<LabeledInstance>, EvalError> {
    let design = design(a, config)?;
    let features = entry_features(&a.entry, config.tokenizer, config.features);
    Ok(features
        .into_iter()
        .zip(design.y)
        .map(|(features, is_supporting_fact)| LabeledInstance {
            entry_id: a.entry.id.clone(),
            features,
            is_supporting_fact,
        })
        .collect())
}

pub fn design(a: &AnnotatedEntry, config: &EvalConfig) -> Result<EntryDesign, EvalError> {
    let features = entry_features(&a.entry, config.tokenizer, config.features);
    let mut y = vec![false; features.len()];
    for &fact in &a.supporting_facts {
        let i = a
            .entry
            .global_index(fact)
            .ok_or_else(|| EvalError::DanglingFact { entry: a.entry.id.clone(), fact })?;
        y[i] = true;
    }
    Ok(EntryDesign { entry_id: a.entry.id.clone(), x: features.iter().map(FeatureVector::to_array).collect(), y })
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Shuffle seed for one (run, fold) pair, derived from the base seed.
pub fn fold_seed(seed: u64, run: usize, fold: usize) -> u64 {
    splitmix(splitmix(splitmix(seed) ^ run as u64) ^ fold as u64)
}

/// 95% half-width of the mean of `values` using the Student-t quantile.
/// Zero for a single value.
pub fn half_width(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    let t = StudentsT::new(0.0, 1.0, (n - 1) as f64).expect("df >= 1").inverse_cdf(0.975);
    t * var.sqrt() / (n as f64).sqrt()
}

/// Leave-one-out evaluation over pre-computed designs.
///
/// Designs are processed in entry-id order, so the result does not depend
/// on input order. Folds run in parallel and are reduced in fold order.
pub fn loo_designs(designs: &[EntryDesign], config: &EvalConfig) -> Result<EvalScores, EvalError> {
    if config.runs == 0 {
        return Err(EvalError::NoRuns);
    }
    if designs.len() < 2 {
        return Err(EvalError::TooFew(designs.len()));
    }
    let mut sorted: Vec<&EntryDesign> = designs.iter().collect();
    sorted.sort_by(|a, b| a.entry_id.cmp(&b.entry_id));
    let mut seen = HashSet::new();
    for d in &sorted {
        if !seen.insert(&d.entry_id) {
            return Err(EvalError::DuplicateEntry(d.entry_id.clone()));
        }
    }
    let excluded: Vec<String> =
        sorted.iter().filter(|d| d.positives() == 0).map(|d| d.entry_id.clone()).collect();
    if !excluded.is_empty() {
        info!("{} entries without supporting facts are trained on but not scored", excluded.len());
    }
    let scored: Vec<usize> = (0..sorted.len()).filter(|&i| sorted[i].positives() > 0).collect();
    if scored.is_empty() {
        return Err(EvalError::NothingToEvaluate);
    }

    let mut runs = Vec::with_capacity(config.runs);
    for run in 0..config.runs {
        let folds: Vec<Result<PrfScore, EvalError>> = scored
            .par_iter()
            .map(|&held| {
                let mut x = Vec::new();
                let mut y = Vec::new();
                for (i, d) in sorted.iter().enumerate() {
                    if i != held {
                        x.extend_from_slice(&d.x);
                        y.extend_from_slice(&d.y);
                    }
                }
                let fit = FitConfig { seed: fold_seed(config.fit.seed, run, held), ..config.fit };
                let model = fit_matrix(&x, &y, &fit)
                    .map_err(|source| EvalError::Fit { entry: sorted[held].entry_id.clone(), source })?;
                let d = sorted[held];
                let mut tp = 0;
                let mut predicted = 0;
                for (row, &gold) in d.x.iter().zip(&d.y) {
                    if model.predict_raw(row).label {
                        predicted += 1;
                        tp += usize::from(gold);
                    }
                }
                Ok(PrfScore::from_counts(tp, predicted, d.positives()))
            })
            .collect();
        let mut sum = [0.0; 3];
        for f in folds {
            let s = f?;
            sum[0] += s.precision;
            sum[1] += s.recall;
            sum[2] += s.f1;
        }
        let n = scored.len() as f64;
        runs.push(PrfScore { precision: sum[0] / n, recall: sum[1] / n, f1: sum[2] / n });
    }

    let col = |f: fn(&PrfScore) -> f64| runs.iter().map(f).collect::<Vec<f64>>();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (p, r, f) = (col(|s| s.precision), col(|s| s.recall), col(|s| s.f1));
    Ok(EvalScores {
        precision: mean(&p),
        recall: mean(&r),
        f1: mean(&f),
        precision_half_width: half_width(&p),
        recall_half_width: half_width(&r),
        f1_half_width: half_width(&f),
        runs,
        evaluated: scored.len(),
        excluded,
    })
}

pub fn loo_evaluate(sample: &[AnnotatedEntry], config: &EvalConfig) -> Result<EvalScores, EvalError> {
    let designs = sample.iter().map(|a| design(a, config)).collect::<Result<Vec<_>, _>>()?;
    loo_designs(&designs, config)
}

/// Runs [`loo_evaluate`] separately for every dataset present in `sample`.
pub fn loo_by_dataset(
    sample: &[AnnotatedEntry],
    config: &EvalConfig,
) -> Result<Vec<(Dataset, EvalScores)>, EvalError> {
    let mut groups: BTreeMap<Dataset, Vec<AnnotatedEntry>> = BTreeMap::new();
    for a in sample {
        groups.entry(a.entry.dataset).or_default().push(a.clone());
    }
    groups.into_iter().map(|(d, g)| loo_evaluate(&g, config).map(|s| (d, s))).collect()
}
