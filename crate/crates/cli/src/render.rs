//! Plain-text tables. Columns are padded to their widest cell.

use std::fmt::Write;

use mrc_audit::cuebaseline::EvalScores;
use mrc_audit::schema::{taxonomy, AnnotationRecord, Family, ValidationResult};
use mrc_audit::scoring::{AgreementReport, AgreementRow, DatasetReport, Denominator};
use mrc_audit::textlex::FeatureVector;

fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (i, cell) in r.iter().enumerate() {
            if i > 0 {
                line.push_str("  ");
            }
            // first column left-aligned, numbers right-aligned
            if i == 0 {
                write!(line, "{cell:<w$}", w = widths[i]).unwrap();
            } else {
                write!(line, "{cell:>w$}", w = widths[i]).unwrap();
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

pub fn feature_cells(v: &FeatureVector) -> Vec<String> {
    vec![
        v.joint_words.to_string(),
        v.longest_ngram.to_string(),
        u8::from(v.unique_unigram).to_string(),
        u8::from(v.unique_bigram).to_string(),
        v.sentence_index.to_string(),
    ]
}

pub fn validation_table(results: &[(&AnnotationRecord, ValidationResult)]) -> String {
    let mut out = String::new();
    for (r, v) in results {
        let status = if v.is_valid() { "ok" } else { "invalid" };
        writeln!(out, "{}\t{}\t{status}", r.entry_id, r.annotator_id).unwrap();
        for i in &v.errors {
            writeln!(out, "  error\t{}\t{}", i.rule, i.message).unwrap();
        }
        for i in &v.warnings {
            writeln!(out, "  warning\t{}\t{}", i.rule, i.message).unwrap();
        }
    }
    out
}

fn pm(mean: f64, half: f64) -> String {
    format!("{mean:.2} ± {half:.2}")
}

pub fn baseline_table(rows: &[(String, EvalScores)]) -> String {
    let mut cells = vec![["Dataset", "Precision", "Recall", "F1", "Scored", "Excluded"].map(String::from).to_vec()];
    for (name, s) in rows {
        cells.push(vec![
            name.clone(),
            pm(s.precision, s.precision_half_width),
            pm(s.recall, s.recall_half_width),
            pm(s.f1, s.f1_half_width),
            s.evaluated.to_string(),
            s.excluded.len().to_string(),
        ]);
    }
    table(&cells)
}

fn agreement_cells(name: String, row: &AgreementRow) -> Vec<String> {
    let c = &row.counts;
    vec![
        name,
        row.pairs.to_string(),
        c.true_positives.to_string(),
        c.false_positives.to_string(),
        c.false_negatives.to_string(),
        format!("{:.2}", row.f1),
    ]
}

pub fn agreement_table(report: &AgreementReport) -> String {
    let mut cells = vec![["Dataset", "Pairs", "TP", "FP", "FN", "F1"].map(String::from).to_vec()];
    for row in &report.per_dataset {
        let name = row.dataset.map_or_else(|| "unknown".to_string(), |d| d.name().to_string());
        cells.push(agreement_cells(name, row));
    }
    cells.push(agreement_cells("Micro".into(), &report.micro));
    table(&cells)
}

fn denominator_name(d: Denominator) -> &'static str {
    match d {
        Denominator::AllRecords => "records",
        Denominator::Answerable => "answerable",
        Denominator::WithSupportingFacts => "with supporting facts",
    }
}

fn dataset_name(r: &DatasetReport) -> String {
    r.dataset.map_or_else(|| "all".to_string(), |d| d.name().to_string())
}

/// Label rows against dataset columns; each cell is `absolute relative`.
pub fn report_table(reports: &[DatasetReport]) -> String {
    let mut header = vec!["Label".to_string()];
    header.extend(reports.iter().map(dataset_name));
    let mut cells = vec![header];
    let mut records = vec!["Records".to_string()];
    records.extend(reports.iter().map(|r| r.records.to_string()));
    cells.push(records);
    for family in Family::ALL {
        let Some(first) = reports.first() else { break };
        let kind = first.family(family).denominator_kind;
        let mut den = vec![format!("{} (of {})", taxonomy().root(family).display_name(), denominator_name(kind))];
        den.extend(reports.iter().map(|r| r.family(family).denominator.to_string()));
        cells.push(den);
        for label in taxonomy().subtree(family) {
            let mut row = vec![format!("{}{}", "  ".repeat(label.depth() + 1), label.display_name())];
            row.extend(reports.iter().map(|r| {
                let row = r.row(label);
                format!("{} {}", row.absolute, row.relative())
            }));
            cells.push(row);
        }
    }
    table(&cells)
}

/// Long-format series for bar charts: one line per (label, dataset).
pub fn chart_series(reports: &[DatasetReport]) -> String {
    let mut out = String::from("family\tlabel\tdataset\tpercentage\n");
    for family in Family::ALL {
        for label in taxonomy().subtree(family) {
            for r in reports {
                let row = r.row(label);
                writeln!(out, "{}\t{}\t{}\t{}", family.name(), label.path_string(), dataset_name(r), row.relative())
                    .unwrap();
            }
        }
    }
    out
}
