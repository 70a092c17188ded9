//! Annotation schema: the taxonomy, the record model, validation and
//! label-level comparison of two records.

mod diff;
mod record;
mod taxonomy;
mod validate;

pub use diff::{decisions, diff, DiffLabel, EntryMismatch, LabelDiff};
pub use record::{
    check_version, parse_record, read_records, record_to_line, write_records, AnnotationRecord,
    CorrectnessJudgement, RecordIoError, VersionError, SCHEMA_MAJOR, SCHEMA_VERSION,
};
pub use taxonomy::{taxonomy, Family, LabelError, LabelId, Node, Taxonomy};
pub use validate::{validate, Issue, Rule, Severity, StructuralError, ValidationResult, RULES};

/// Rule identifiers, re-exported for callers matching on specific issues.
pub mod rules {
    pub use super::validate::{
        CORRECTNESS_NOTE, DANGLING_REF, FACTS_ON_UNANSWERABLE, LABEL_NOT_LEAF, MISSING_ANNOTATOR,
        MISSING_ANSWER_TYPE, REASONING_ON_UNANSWERABLE, RETRIEVAL_WITH_REASONING,
        UNANSWERABLE_EXCLUSIVE, WRONG_FAMILY,
    };
}
