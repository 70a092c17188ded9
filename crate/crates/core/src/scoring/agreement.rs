use std::collections::BTreeMap;

use log::warn;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Dataset, GoldEntry};
use crate::schema::{diff, AnnotationRecord};

/// Pooled label-decision counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

impl Counts {
    /// `2TP / (2TP + FP + FN)`; 1 when there is nothing to disagree on.
    pub fn f1(&self) -> f64 {
        let tp = 2 * self.true_positives;
        let denom = tp + self.false_positives + self.false_negatives;
        if denom == 0 {
            1.0
        } else {
            tp as f64 / denom as f64
        }
    }

    fn add(&mut self, o: Counts) {
        self.true_positives += o.true_positives;
        self.false_positives += o.false_positives;
        self.false_negatives += o.false_negatives;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementRow {
    pub dataset: Option<Dataset>,
    pub pairs: usize,
    pub counts: Counts,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub per_dataset: Vec<AgreementRow>,
    /// Decisions pooled over every pair regardless of dataset.
    pub micro: AgreementRow,
    /// Entry ids annotated by only one side.
    pub unpaired: Vec<String>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AgreementError {
    #[error("no record pairs to compare")]
    NoPairs,
    #[error("record for unknown entry `{0}`")]
    UnknownEntry(String),
    #[error("entry `{0}` has more than one record on the same side")]
    DuplicateRecord(String),
}

fn index(records: &[AnnotationRecord]) -> Result<BTreeMap<&str, &AnnotationRecord>, AgreementError> {
    let mut out = BTreeMap::new();
    for r in records {
        if out.insert(r.entry_id.as_str(), r).is_some() {
            return Err(AgreementError::DuplicateRecord(r.entry_id.clone()));
        }
    }
    Ok(out)
}

/// Inter-annotator agreement treating `gold` as the reference annotation.
pub fn agreement(
    gold: &[AnnotationRecord],
    other: &[AnnotationRecord],
    entries: &[GoldEntry],
) -> Result<AgreementReport, AgreementError> {
    let datasets: BTreeMap<&str, Dataset> = entries.iter().map(|e| (e.id.as_str(), e.dataset)).collect();
    let g = index(gold)?;
    let o = index(other)?;
    let mut unpaired: Vec<String> = Vec::new();
    for id in g.keys().filter(|k| !o.contains_key(*k)).chain(o.keys().filter(|k| !g.contains_key(*k))) {
        unpaired.push((*id).to_string());
    }
    unpaired.sort();
    if !unpaired.is_empty() {
        warn!("skipping {} entries annotated on one side only", unpaired.len());
    }

    let mut per: BTreeMap<Dataset, (usize, Counts)> = BTreeMap::new();
    for (id, a) in &g {
        let Some(b) = o.get(id) else { continue };
        let dataset = *datasets.get(id).ok_or_else(|| AgreementError::UnknownEntry((*id).to_string()))?;
        let d = diff(a, b).expect("paired by entry id");
        let (tp, fp, fn_) = d.counts();
        let slot = per.entry(dataset).or_default();
        slot.0 += 1;
        slot.1.add(Counts { true_positives: tp, false_positives: fp, false_negatives: fn_ });
    }
    if per.is_empty() {
        return Err(AgreementError::NoPairs);
    }
    let mut micro = AgreementRow { dataset: None, pairs: 0, counts: Counts::default(), f1: 0.0 };
    let per_dataset = per
        .into_iter()
        .map(|(dataset, (pairs, counts))| {
            micro.pairs += pairs;
            micro.counts.add(counts);
            AgreementRow { dataset: Some(dataset), pairs, counts, f1: counts.f1() }
        })
        .collect();
    micro.f1 = micro.counts.f1();
    Ok(AgreementReport { per_dataset, micro, unpaired })
}
