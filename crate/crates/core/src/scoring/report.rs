use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ingest::{Dataset, GoldEntry};
use crate::schema::{taxonomy, validate, AnnotationRecord, Family, Issue, LabelId, StructuralError};

/// Which records a family's percentages are relative to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Denominator {
    AllRecords,
    /// Records not labeled Unanswerable.
    Answerable,
    /// Records with at least one supporting fact.
    WithSupportingFacts,
}

impl Denominator {
    pub fn for_family(f: Family) -> Self {
        match f {
            Family::SupportingFact | Family::AnswerType | Family::Correctness => Denominator::AllRecords,
            Family::Reasoning | Family::Knowledge => Denominator::Answerable,
            Family::LinguisticComplexity => Denominator::WithSupportingFacts,
        }
    }

    fn admits(self, r: &AnnotationRecord, unanswerable: LabelId) -> bool {
        match self {
            Denominator::AllRecords => true,
            Denominator::Answerable => !r.answer_type.contains(&unanswerable),
            Denominator::WithSupportingFacts => !r.supporting_facts.is_empty(),
        }
    }
}

/// Percentage in tenths, `100 * absolute / denominator` rounded half-up.
/// Zero when the denominator is zero.
pub fn relative_tenths(absolute: usize, denominator: usize) -> u64 {
    if denominator == 0 {
        return 0;
    }
    let (a, d) = (absolute as u64, denominator as u64);
    (2000 * a + d) / (2 * d)
}

pub fn format_relative(absolute: usize, denominator: usize) -> String {
    let t = relative_tenths(absolute, denominator);
    format!("{}.{}", t / 10, t % 10)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RowWire", into = "RowWire")]
pub struct ReportRow {
    pub label: LabelId,
    /// Records carrying this leaf, or any leaf below this interior node.
    pub absolute: usize,
    pub denominator: usize,
}

impl ReportRow {
    pub fn relative(&self) -> String {
        format_relative(self.absolute, self.denominator)
    }

    pub fn relative_value(&self) -> f64 {
        relative_tenths(self.absolute, self.denominator) as f64 / 10.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RowWire {
    label: LabelId,
    display: String,
    absolute: usize,
    denominator: usize,
    relative: String,
}

#[derive(Debug, Error)]
#[error("row {label}: stated relative {stated} does not match {absolute}/{denominator} = {expected}")]
pub struct InconsistentRow {
    label: LabelId,
    stated: String,
    absolute: usize,
    denominator: usize,
    expected: String,
}

impl TryFrom<RowWire> for ReportRow {
    type Error = InconsistentRow;

    fn try_from(w: RowWire) -> Result<Self, Self::Error> {
        let expected = format_relative(w.absolute, w.denominator);
        if w.relative != expected || w.absolute > w.denominator {
            return Err(InconsistentRow {
                label: w.label,
                stated: w.relative,
                absolute: w.absolute,
                denominator: w.denominator,
                expected,
            });
        }
        Ok(ReportRow { label: w.label, absolute: w.absolute, denominator: w.denominator })
    }
}

impl From<ReportRow> for RowWire {
    fn from(r: ReportRow) -> Self {
        RowWire {
            label: r.label,
            display: r.label.display_name().to_string(),
            absolute: r.absolute,
            denominator: r.denominator,
            relative: r.relative(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: Family,
    pub denominator_kind: Denominator,
    pub denominator: usize,
    /// Every node of the family in depth-first order, the root first.
    pub rows: Vec<ReportRow>,
}

impl FamilyReport {
    pub fn row(&self, label: LabelId) -> Option<&ReportRow> {
        self.rows.iter().find(|r| r.label == label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetReport {
    /// `None` when the records span several datasets.
    pub dataset: Option<Dataset>,
    pub records: usize,
    pub families: Vec<FamilyReport>,
}

impl DatasetReport {
    pub fn family(&self, f: Family) -> &FamilyReport {
        self.families.iter().find(|r| r.family == f).expect("every family is reported")
    }

    pub fn row(&self, label: LabelId) -> &ReportRow {
        self.family(label.family()).row(label).expect("every node has a row")
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum AggregateError {
    #[error("record for unknown entry `{0}`")]
    UnknownEntry(String),
    #[error("entry `{0}` has more than one record; select one annotator")]
    DuplicateRecord(String),
    #[error(transparent)]
    Structural(#[from] StructuralError),
    #[error("record for `{entry_id}` fails validation: {}", .issues.iter().map(|i| i.message.as_str()).collect::<Vec<_>>().join("; "))]
    Invalid { entry_id: String, issues: Vec<Issue> },
}

fn check<'a>(
    records: &'a [AnnotationRecord],
    entries: &'a [GoldEntry],
) -> Result<Vec<(&'a AnnotationRecord, &'a GoldEntry)>, AggregateError> {
    let by_id: BTreeMap<&str, &GoldEntry> = entries.iter().map(|e| (e.id.as_str(), e)).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(records.len());
    for r in records {
        let e = by_id.get(r.entry_id.as_str()).ok_or_else(|| AggregateError::UnknownEntry(r.entry_id.clone()))?;
        if !seen.insert(r.entry_id.as_str()) {
            return Err(AggregateError::DuplicateRecord(r.entry_id.clone()));
        }
        let v = validate(r, e)?;
        if !v.is_valid() {
            return Err(AggregateError::Invalid { entry_id: r.entry_id.clone(), issues: v.errors });
        }
        out.push((r, *e));
    }
    Ok(out)
}

fn count(records: &[&AnnotationRecord], dataset: Option<Dataset>) -> DatasetReport {
    let tax = taxonomy();
    let unanswerable = LabelId::parse("AnswerType/Unanswerable").expect("built-in label");
    let supporting = tax.root(Family::SupportingFact);
    let families = Family::ALL
        .iter()
        .map(|&family| {
            let kind = Denominator::for_family(family);
            let eligible: Vec<BTreeSet<LabelId>> = records
                .iter()
                .filter(|r| kind.admits(r, unanswerable))
                .map(|r| {
                    let mut l = r.labels();
                    if !r.supporting_facts.is_empty() {
                        l.insert(supporting);
                    }
                    l
                })
                .collect();
            let denominator = eligible.len();
            let rows = tax
                .subtree(family)
                .map(|node| ReportRow {
                    label: node,
                    absolute: eligible.iter().filter(|ls| ls.iter().any(|l| l.is_within(node))).count(),
                    denominator,
                })
                .collect();
            FamilyReport { family, denominator_kind: kind, denominator, rows }
        })
        .collect();
    DatasetReport { dataset, records: records.len(), families }
}

/// One report over all records. Each record is validated against its entry
/// first; one record per entry is expected.
pub fn aggregate(records: &[AnnotationRecord], entries: &[GoldEntry]) -> Result<DatasetReport, AggregateError> {
    let pairs = check(records, entries)?;
    let datasets: BTreeSet<Dataset> = pairs.iter().map(|(_, e)| e.dataset).collect();
    let dataset = if datasets.len() == 1 { datasets.into_iter().next() } else { None };
    let rs: Vec<&AnnotationRecord> = pairs.iter().map(|(r, _)| *r).collect();
    Ok(count(&rs, dataset))
}

/// One report per dataset present, in dataset order.
pub fn aggregate_by_dataset(
    records: &[AnnotationRecord],
    entries: &[GoldEntry],
) -> Result<Vec<DatasetReport>, AggregateError> {
    let pairs = check(records, entries)?;
    let mut groups: BTreeMap<Dataset, Vec<&AnnotationRecord>> = BTreeMap::new();
    for (r, e) in pairs {
        groups.entry(e.dataset).or_default().push(r);
    }
    Ok(groups.into_iter().map(|(d, rs)| count(&rs, Some(d))).collect())
}
