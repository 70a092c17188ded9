use std::collections::{BTreeMap, BTreeSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::taxonomy::LabelId;
use crate::ingest::SentenceRef;

/// Version written into every serialized record.
pub const SCHEMA_VERSION: &str = "1.0";
pub const SCHEMA_MAJOR: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectnessJudgement {
    /// A leaf under `Correctness/Debatable` or `Correctness/Wrong`.
    pub label: LabelId,
    #[serde(default)]
    pub note: String,
}

/// One annotator's labeling of one entry.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RecordWire", into = "RecordWire")]
pub struct AnnotationRecord {
    pub entry_id: String,
    pub annotator_id: String,
    pub supporting_facts: BTreeSet<SentenceRef>,
    /// Usually a single leaf; multiple-choice entries may carry one per
    /// distinct choice type.
    pub answer_type: BTreeSet<LabelId>,
    pub correctness: Option<CorrectnessJudgement>,
    pub reasoning: BTreeSet<LabelId>,
    pub knowledge: BTreeSet<LabelId>,
    /// Linguistic-complexity leaves with optional sentence anchors.
    pub linguistic: BTreeMap<LabelId, BTreeSet<SentenceRef>>,
    pub notes: String,
}

impl AnnotationRecord {
    pub fn new(entry_id: impl Into<String>, annotator_id: impl Into<String>) -> Self {
        AnnotationRecord { entry_id: entry_id.into(), annotator_id: annotator_id.into(), ..Default::default() }
    }

    /// Every taxonomy label attached to the record.
    pub fn labels(&self) -> BTreeSet<LabelId> {
        let mut out: BTreeSet<LabelId> = self.answer_type.clone();
        out.extend(self.correctness.iter().map(|c| c.label));
        out.extend(&self.reasoning);
        out.extend(&self.knowledge);
        out.extend(self.linguistic.keys());
        out
    }

    pub fn has_label(&self, l: LabelId) -> bool {
        self.labels().contains(&l)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LinguisticWire {
    label: LabelId,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    sentences: Vec<SentenceRef>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RecordWire {
    schema_version: String,
    #[serde(default)]
    entry_id: String,
    #[serde(default)]
    annotator_id: String,
    #[serde(default)]
    supporting_facts: Vec<SentenceRef>,
    #[serde(default)]
    answer_type: Vec<LabelId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    correctness: Option<CorrectnessJudgement>,
    #[serde(default)]
    reasoning: Vec<LabelId>,
    #[serde(default)]
    knowledge: Vec<LabelId>,
    #[serde(default)]
    linguistic: Vec<LinguisticWire>,
    #[serde(default)]
    notes: String,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VersionError {
    #[error("malformed schema version `{0}`")]
    Malformed(String),
    #[error("unsupported schema major version {0} (this reader understands {SCHEMA_MAJOR})")]
    UnsupportedMajor(u32),
}

pub fn check_version(v: &str) -> Result<(), VersionError> {
    let major: u32 = v
        .split('.')
        .next()
        .and_then(|m| m.parse().ok())
        .ok_or_else(|| VersionError::Malformed(v.to_string()))?;
    if major != SCHEMA_MAJOR {
        return Err(VersionError::UnsupportedMajor(major));
    }
    Ok(())
}

impl TryFrom<RecordWire> for AnnotationRecord {
    type Error = VersionError;

    fn try_from(w: RecordWire) -> Result<Self, Self::Error> {
        check_version(&w.schema_version)?;
        let mut linguistic: BTreeMap<LabelId, BTreeSet<SentenceRef>> = BTreeMap::new();
        for l in w.linguistic {
            linguistic.entry(l.label).or_default().extend(l.sentences);
        }
        Ok(AnnotationRecord {
            entry_id: w.entry_id,
            annotator_id: w.annotator_id,
            supporting_facts: w.supporting_facts.into_iter().collect(),
            answer_type: w.answer_type.into_iter().collect(),
            correctness: w.correctness,
            reasoning: w.reasoning.into_iter().collect(),
            knowledge: w.knowledge.into_iter().collect(),
            linguistic,
            notes: w.notes,
        })
    }
}

impl From<AnnotationRecord> for RecordWire {
    fn from(r: AnnotationRecord) -> Self {
        RecordWire {
            schema_version: SCHEMA_VERSION.to_string(),
            entry_id: r.entry_id,
            annotator_id: r.annotator_id,
            supporting_facts: r.supporting_facts.into_iter().collect(),
            answer_type: r.answer_type.into_iter().collect(),
            correctness: r.correctness,
            reasoning: r.reasoning.into_iter().collect(),
            knowledge: r.knowledge.into_iter().collect(),
            linguistic: r
                .linguistic
                .into_iter()
                .map(|(label, s)| LinguisticWire { label, sentences: s.into_iter().collect() })
                .collect(),
            notes: r.notes,
        }
    }
}

#[derive(Debug, Error)]
pub enum RecordIoError {
    #[error("record line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn parse_record(line: &str) -> Result<AnnotationRecord, serde_json::Error> {
    serde_json::from_str(line)
}

pub fn record_to_line(r: &AnnotationRecord) -> String {
    serde_json::to_string(r).expect("records always serialize")
}

/// Reads one record per non-blank line.
pub fn read_records<R: BufRead>(reader: R) -> Result<Vec<AnnotationRecord>, RecordIoError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_record(&line).map_err(|source| RecordIoError::Json { line: i + 1, source })?);
    }
    Ok(out)
}

pub fn write_records<W: Write>(mut w: W, records: &[AnnotationRecord]) -> std::io::Result<()> {
    for r in records {
        w.write_all(record_to_line(r).as_bytes())?;
        w.write_all(b"\n")?;
    }
    w.flush()
}
