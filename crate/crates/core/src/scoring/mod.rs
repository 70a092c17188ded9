//! Answer metrics, inter-annotator agreement and per-dataset label reports.

mod agreement;
mod metrics;
mod report;

pub use agreement::{agreement, AgreementError, AgreementReport, AgreementRow, Counts};
pub use metrics::{
    aggregate_f1, answer_tokens, best_over_golds, exact_match, exact_match_with, harmonic, normalize_answer,
    score_predictions, token_f1, token_f1_with, AggregateF1, EmptyScores, Normalization, PredictedAnswer,
    Prediction, PredictionScores, Prf,
};
pub use report::{
    aggregate, aggregate_by_dataset, format_relative, relative_tenths, AggregateError, DatasetReport, Denominator,
    FamilyReport, InconsistentRow, ReportRow,
};
