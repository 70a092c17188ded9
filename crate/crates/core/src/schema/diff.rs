use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use super::record::AnnotationRecord;
use super::taxonomy::LabelId;
use crate::ingest::SentenceRef;

/// A single label decision: a taxonomy leaf or a supporting-fact sentence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DiffLabel {
    Label(LabelId),
    Fact(SentenceRef),
}

impl fmt::Display for DiffLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DiffLabel::Label(l) => write!(f, "{l}"),
            DiffLabel::Fact(r) => write!(f, "SupportingFact/{}/{}", r.passage, r.sentence),
        }
    }
}

impl Serialize for DiffLabel {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LabelDiff {
    pub true_positives: BTreeSet<DiffLabel>,
    pub false_positives: BTreeSet<DiffLabel>,
    pub false_negatives: BTreeSet<DiffLabel>,
}

impl LabelDiff {
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.true_positives.len(), self.false_positives.len(), self.false_negatives.len())
    }

    pub fn facts(set: &BTreeSet<DiffLabel>) -> usize {
        set.iter().filter(|d| matches!(d, DiffLabel::Fact(_))).count()
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("cannot compare records for different entries (`{gold}` vs `{other}`)")]
pub struct EntryMismatch {
    pub gold: String,
    pub other: String,
}

pub fn decisions(r: &AnnotationRecord) -> BTreeSet<DiffLabel> {
    r.labels()
        .into_iter()
        .map(DiffLabel::Label)
        .chain(r.supporting_facts.iter().copied().map(DiffLabel::Fact))
        .collect()
}

/// Multi-label comparison of `other` against `gold`.
pub fn diff(gold: &AnnotationRecord, other: &AnnotationRecord) -> Result<LabelDiff, EntryMismatch> {
    if gold.entry_id != other.entry_id {
        return Err(EntryMismatch { gold: gold.entry_id.clone(), other: other.entry_id.clone() });
    }
    let g = decisions(gold);
    let o = decisions(other);
    Ok(LabelDiff {
        true_positives: g.intersection(&o).copied().collect(),
        false_positives: o.difference(&g).copied().collect(),
        false_negatives: g.difference(&o).copied().collect(),
    })
}
