//! Record validation against the annotation guidelines.
//!
//! Rule ids are stable strings; they are published through [`RULES`] so a
//! client can mirror the same checks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::record::AnnotationRecord;
use super::taxonomy::{taxonomy, Family, LabelId};
use crate::ingest::{GoldEntry, SentenceRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub id: &'static str,
    pub severity: Severity,
    pub description: &'static str,
}

pub const DANGLING_REF: &str = "dangling-sentence-ref";
pub const MISSING_ANSWER_TYPE: &str = "missing-answer-type";
pub const MISSING_ANNOTATOR: &str = "missing-annotator";
pub const LABEL_NOT_LEAF: &str = "label-not-leaf";
pub const WRONG_FAMILY: &str = "label-wrong-family";
pub const UNANSWERABLE_EXCLUSIVE: &str = "unanswerable-exclusive";
pub const REASONING_ON_UNANSWERABLE: &str = "reasoning-on-unanswerable";
pub const FACTS_ON_UNANSWERABLE: &str = "facts-on-unanswerable";
pub const CORRECTNESS_NOTE: &str = "correctness-without-note";
pub const RETRIEVAL_WITH_REASONING: &str = "retrieval-with-reasoning";

pub const RULES: &[Rule] = &[
    Rule {
        id: DANGLING_REF,
        severity: Severity::Error,
        description: "Sentence references must resolve to a sentence of the entry.",
    },
    Rule {
        id: MISSING_ANSWER_TYPE,
        severity: Severity::Error,
        description: "Every record carries an answer type.",
    },
    Rule {
        id: MISSING_ANNOTATOR,
        severity: Severity::Error,
        description: "Every record names its annotator.",
    },
    Rule {
        id: LABEL_NOT_LEAF,
        severity: Severity::Error,
        description: "Only leaf labels may be attached; interior nodes are grouping-only.",
    },
    Rule {
        id: WRONG_FAMILY,
        severity: Severity::Error,
        description: "Each field only takes labels from its own family.",
    },
    Rule {
        id: UNANSWERABLE_EXCLUSIVE,
        severity: Severity::Error,
        description: "Unanswerable cannot be combined with another answer type.",
    },
    Rule {
        id: REASONING_ON_UNANSWERABLE,
        severity: Severity::Error,
        description: "Unanswerable records carry no reasoning labels.",
    },
    Rule {
        id: FACTS_ON_UNANSWERABLE,
        severity: Severity::Error,
        description: "Unanswerable records carry no supporting facts.",
    },
    Rule {
        id: CORRECTNESS_NOTE,
        severity: Severity::Error,
        description: "Debatable or Wrong answers need a note with the alternatives.",
    },
    Rule {
        id: RETRIEVAL_WITH_REASONING,
        severity: Severity::Warning,
        description: "Retrieval alongside operational or arithmetic reasoning is suspicious: \
                      reasoning is not annotated when the answer is stated directly.",
    },
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Issue {
    pub rule: String,
    pub message: String,
    /// Offending label, field or sentence reference.
    pub subject: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationResult {
    pub errors: Vec<Issue>,
    pub warnings: Vec<Issue>,
}

impl ValidationResult {
    /// Storable iff there are no errors.
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn has_rule(&self, rule: &str) -> bool {
        self.errors.iter().chain(&self.warnings).any(|i| i.rule == rule)
    }

    fn error(&mut self, rule: &str, message: impl Into<String>, subject: impl ToString) {
        self.errors.push(Issue { rule: rule.into(), message: message.into(), subject: subject.to_string() });
    }

    fn warn(&mut self, rule: &str, message: impl Into<String>, subject: impl ToString) {
        self.warnings.push(Issue { rule: rule.into(), message: message.into(), subject: subject.to_string() });
    }
}

/// Problems that make a record unattributable, as opposed to rule violations.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum StructuralError {
    #[error("record has no entry_id")]
    MissingEntryId,
    #[error("record references entry `{record}` but was validated against `{entry}`")]
    EntryMismatch { record: String, entry: String },
}

fn check_family(
    out: &mut ValidationResult,
    field: &str,
    labels: impl IntoIterator<Item = LabelId>,
    family: Family,
) {
    for l in labels {
        if l.family() != family {
            out.error(WRONG_FAMILY, format!("{field} takes {} labels", family.name()), l);
        } else if !l.is_leaf() {
            out.error(LABEL_NOT_LEAF, "interior label attached", l);
        }
    }
}

fn check_refs<'a>(
    out: &mut ValidationResult,
    entry: &GoldEntry,
    field: &str,
    refs: impl IntoIterator<Item = &'a SentenceRef>,
) {
    for r in refs {
        if !entry.has_sentence(*r) {
            out.error(DANGLING_REF, format!("dangling sentence ref in {field}"), r);
        }
    }
}

pub fn validate(record: &AnnotationRecord, entry: &GoldEntry) -> Result<ValidationResult, StructuralError> {
    if record.entry_id.is_empty() {
        return Err(StructuralError::MissingEntryId);
    }
    if record.entry_id != entry.id {
        return Err(StructuralError::EntryMismatch {
            record: record.entry_id.clone(),
            entry: entry.id.clone(),
        });
    }
    let mut out = ValidationResult::default();
    let tax = taxonomy();

    if record.annotator_id.trim().is_empty() {
        out.error(MISSING_ANNOTATOR, "missing annotator_id", "annotator_id");
    }

    check_refs(&mut out, entry, "supporting_facts", &record.supporting_facts);
    for (label, refs) in &record.linguistic {
        check_refs(&mut out, entry, &format!("linguistic {label}"), refs);
    }

    if record.answer_type.is_empty() {
        out.error(MISSING_ANSWER_TYPE, "missing answer_type", "answer_type");
    }
    check_family(&mut out, "answer_type", record.answer_type.iter().copied(), Family::AnswerType);
    check_family(&mut out, "reasoning", record.reasoning.iter().copied(), Family::Reasoning);
    check_family(&mut out, "knowledge", record.knowledge.iter().copied(), Family::Knowledge);
    check_family(&mut out, "linguistic", record.linguistic.keys().copied(), Family::LinguisticComplexity);

    if let Some(c) = &record.correctness {
        check_family(&mut out, "correctness", [c.label], Family::Correctness);
        if c.note.trim().is_empty() {
            out.error(CORRECTNESS_NOTE, "correctness judgement without a note", c.label);
        }
    }

    let unanswerable = LabelId::parse("AnswerType/Unanswerable").expect("built-in label");
    if record.answer_type.contains(&unanswerable) {
        if record.answer_type.len() > 1 {
            out.error(UNANSWERABLE_EXCLUSIVE, "unanswerable combined with another answer type", unanswerable);
        }
        for l in &record.reasoning {
            out.error(REASONING_ON_UNANSWERABLE, "reasoning on unanswerable", l);
        }
        if !record.supporting_facts.is_empty() {
            out.error(FACTS_ON_UNANSWERABLE, "supporting facts on unanswerable", "supporting_facts");
        }
    }

    let retrieval = tax.lookup(&["Reasoning", "Retrieval"]).expect("built-in label");
    let abstract_groups = [
        tax.lookup(&["Reasoning", "Operational"]).expect("built-in label"),
        tax.lookup(&["Reasoning", "Arithmetic"]).expect("built-in label"),
    ];
    if record.reasoning.contains(&retrieval) {
        for l in &record.reasoning {
            if abstract_groups.iter().any(|g| l.is_within(*g)) {
                out.warn(RETRIEVAL_WITH_REASONING, "retrieval co-occurs with abstract reasoning", l);
            }
        }
    }

    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{Answer, Dataset, Passage};
    use crate::schema::record::CorrectnessJudgement;
    use std::collections::BTreeMap;

    fn l(p: &str) -> LabelId {
        LabelId::parse(p).unwrap()
    }

    fn entry() -> GoldEntry {
        GoldEntry::new(
            "e1".into(),
            Dataset::DROP,
            "Who scored?".into(),
            vec![Answer::FreeForm { text: "Lewis".into() }],
            vec![Passage::split(None, "Lewis scored. Brown left. They won.".into())],
            BTreeMap::new(),
        )
        .unwrap()
    }

    fn base() -> AnnotationRecord {
        let mut r = AnnotationRecord::new("e1", "a1");
        r.answer_type.insert(l("AnswerType/Span"));
        r
    }

    #[test]
    fn minimal_well_formed() {
        let mut r = base();
        r.reasoning.insert(l("Reasoning/Retrieval"));
        r.supporting_facts.insert(SentenceRef::new(0, 1));
        let v = validate(&r, &entry()).unwrap();
        assert!(v.is_valid(), "{v:?}");
        assert!(v.warnings.is_empty());
    }

    #[test]
    fn reasoning_on_unanswerable() {
        let mut r = AnnotationRecord::new("e1", "a1");
        r.answer_type.insert(l("AnswerType/Unanswerable"));
        r.reasoning.insert(l("Reasoning/Operational/Bridge"));
        let v = validate(&r, &entry()).unwrap();
        assert_eq!(v.errors.len(), 1);
        assert_eq!(v.errors[0].rule, REASONING_ON_UNANSWERABLE);
        assert_eq!(v.errors[0].message, "reasoning on unanswerable");
    }

    #[test]
    fn dangling_ref() {
        let mut r = base();
        r.supporting_facts.insert(SentenceRef::new(0, 99));
        let v = validate(&r, &entry()).unwrap();
        assert!(v.has_rule(DANGLING_REF));
        assert!(v.errors[0].message.starts_with("dangling sentence ref"));
        let mut r = base();
        r.linguistic
            .entry(l("LinguisticComplexity/LexicalAmbiguity/Coreference"))
            .or_default()
            .insert(SentenceRef::new(1, 0));
        assert!(validate(&r, &entry()).unwrap().has_rule(DANGLING_REF));
    }

    #[test]
    fn missing_answer_type() {
        let r = AnnotationRecord::new("e1", "a1");
        assert!(validate(&r, &entry()).unwrap().has_rule(MISSING_ANSWER_TYPE));
    }

    #[test]
    fn facts_on_unanswerable_and_exclusivity() {
        let mut r = AnnotationRecord::new("e1", "a1");
        r.answer_type.insert(l("AnswerType/Unanswerable"));
        r.answer_type.insert(l("AnswerType/Span"));
        r.supporting_facts.insert(SentenceRef::new(0, 0));
        let v = validate(&r, &entry()).unwrap();
        assert!(v.has_rule(FACTS_ON_UNANSWERABLE));
        assert!(v.has_rule(UNANSWERABLE_EXCLUSIVE));
    }

    #[test]
    fn correctness_needs_note() {
        let mut r = base();
        r.correctness = Some(CorrectnessJudgement { label: l("Correctness/Wrong/AnswerPresent"), note: " ".into() });
        assert!(validate(&r, &entry()).unwrap().has_rule(CORRECTNESS_NOTE));
        r.correctness.as_mut().unwrap().note = "Brown, not Lewis".into();
        assert!(validate(&r, &entry()).unwrap().is_valid());
    }

    #[test]
    fn interior_and_wrong_family_labels() {
        let mut r = base();
        r.reasoning.insert(l("Reasoning/Operational"));
        r.knowledge.insert(l("Reasoning/Temporal"));
        let v = validate(&r, &entry()).unwrap();
        assert!(v.has_rule(LABEL_NOT_LEAF));
        assert!(v.has_rule(WRONG_FAMILY));
        let mut r = base();
        r.correctness = Some(CorrectnessJudgement { label: l("Correctness/Debatable"), note: "x".into() });
        assert!(validate(&r, &entry()).unwrap().has_rule(LABEL_NOT_LEAF));
    }

    #[test]
    fn retrieval_with_abstract_reasoning_warns() {
        let mut r = base();
        r.reasoning.insert(l("Reasoning/Retrieval"));
        r.reasoning.insert(l("Reasoning/Arithmetic/Counting"));
        r.reasoning.insert(l("Reasoning/Causal"));
        let v = validate(&r, &entry()).unwrap();
        assert!(v.is_valid());
        assert_eq!(v.warnings.len(), 1);
        assert_eq!(v.warnings[0].rule, RETRIEVAL_WITH_REASONING);
    }

    #[test]
    fn structural_errors() {
        let r = AnnotationRecord::new("", "a1");
        assert_eq!(validate(&r, &entry()), Err(StructuralError::MissingEntryId));
        let r = AnnotationRecord::new("other", "a1");
        assert!(matches!(validate(&r, &entry()), Err(StructuralError::EntryMismatch { .. })));
        let r = AnnotationRecord { annotator_id: String::new(), ..base() };
        assert!(validate(&r, &entry()).unwrap().has_rule(MISSING_ANNOTATOR));
    }

    #[test]
    fn every_rule_is_published() {
        for id in [
            DANGLING_REF,
            MISSING_ANSWER_TYPE,
            MISSING_ANNOTATOR,
            LABEL_NOT_LEAF,
            WRONG_FAMILY,
            UNANSWERABLE_EXCLUSIVE,
            REASONING_ON_UNANSWERABLE,
            FACTS_ON_UNANSWERABLE,
            CORRECTNESS_NOTE,
            RETRIEVAL_WITH_REASONING,
        ] {
            assert!(RULES.iter().any(|r| r.id == id), "{id}");
        }
    }
}
