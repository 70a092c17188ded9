use std::collections::BTreeMap;

use mrc_audit::ingest::{Answer, Dataset, GoldEntry, Passage, SentenceRef};
use mrc_audit::schema::{
    diff, parse_record, record_to_line, taxonomy, validate, AnnotationRecord, CorrectnessJudgement, Family, LabelId,
};
use mrc_audit::scoring::{
    agreement, aggregate, aggregate_by_dataset, exact_match, token_f1, AggregateError, Denominator,
};
use proptest::prelude::*;
use proptest::sample::subsequence;

fn entry(id: &str, dataset: Dataset) -> GoldEntry {
    GoldEntry::new(
        id.into(),
        dataset,
        "Which team won the game?".into(),
        vec![Answer::FreeForm { text: "Patriots".into() }],
        vec![
            Passage::split(None, "The Pats won. It was close. Brady threw twice.".into()),
            Passage::split(None, "Fans cheered. The stadium was full.".into()),
        ],
        BTreeMap::new(),
    )
    .unwrap()
}

fn leaves(f: Family) -> Vec<LabelId> {
    taxonomy().leaves_of(f).collect()
}

fn unanswerable() -> LabelId {
    LabelId::parse("AnswerType/Unanswerable").unwrap()
}

/// Records that satisfy every error rule against [`entry`].
fn valid_record(entry_id: String, annotator: &'static str) -> impl Strategy<Value = AnnotationRecord> {
    let answerable: Vec<LabelId> = leaves(Family::AnswerType).into_iter().filter(|l| *l != unanswerable()).collect();
    let refs: Vec<SentenceRef> = entry("x", Dataset::DROP).sentence_refs();
    (
        any::<bool>(),
        subsequence(answerable.clone(), 1..=answerable.len()),
        subsequence(refs.clone(), 0..=3),
        subsequence(leaves(Family::Reasoning), 0..=3),
        subsequence(leaves(Family::Knowledge), 0..=2),
        subsequence(leaves(Family::LinguisticComplexity), 0..=3),
        prop::option::of(prop::sample::select(leaves(Family::Correctness))),
    )
        .prop_map(move |(unans, at, facts, reasoning, knowledge, ling, corr)| {
            let mut r = AnnotationRecord::new(entry_id.clone(), annotator);
            if unans {
                r.answer_type.insert(unanswerable());
            } else {
                r.answer_type.extend(at);
                r.supporting_facts.extend(facts);
                r.reasoning.extend(reasoning);
            }
            r.knowledge.extend(knowledge);
            for l in ling {
                r.linguistic.insert(l, Default::default());
            }
            r.correctness = corr.map(|label| CorrectnessJudgement { label, note: "alternative: Pats".into() });
            r
        })
}

fn corpus(n: usize, annotator: &'static str) -> impl Strategy<Value = Vec<AnnotationRecord>> {
    (0..n).map(|i| valid_record(format!("e{i:02}"), annotator)).collect::<Vec<_>>()
}

fn entries(n: usize) -> Vec<GoldEntry> {
    (0..n).map(|i| entry(&format!("e{i:02}"), Dataset::ALL[i % 3])).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn generated_records_are_valid_and_round_trip(r in valid_record("e00".into(), "A")) {
        let v = validate(&r, &entry("e00", Dataset::DROP)).unwrap();
        prop_assert!(v.is_valid(), "{:?}", v);
        prop_assert_eq!(parse_record(&record_to_line(&r)).unwrap(), r);
    }

    #[test]
    fn diff_with_self_is_all_agreement(r in valid_record("e00".into(), "A")) {
        let d = diff(&r, &r).unwrap();
        prop_assert!(d.false_positives.is_empty() && d.false_negatives.is_empty());
    }

    #[test]
    fn swapping_roles_swaps_errors(a in valid_record("e00".into(), "A"), b in valid_record("e00".into(), "B")) {
        let ab = diff(&a, &b).unwrap();
        let ba = diff(&b, &a).unwrap();
        prop_assert_eq!(&ab.true_positives, &ba.true_positives);
        prop_assert_eq!(&ab.false_positives, &ba.false_negatives);
        prop_assert_eq!(&ab.false_negatives, &ba.false_positives);
    }

    #[test]
    fn self_agreement_is_perfect(rs in corpus(9, "A")) {
        let r = agreement(&rs, &rs, &entries(9)).unwrap();
        prop_assert_eq!(r.micro.f1, 1.0);
        prop_assert!(r.per_dataset.iter().all(|d| d.f1 == 1.0));
    }

    #[test]
    fn agreement_values_are_bounded(a in corpus(9, "A"), b in corpus(9, "B")) {
        let r = agreement(&a, &b, &entries(9)).unwrap();
        prop_assert!((0.0..=1.0).contains(&r.micro.f1));
        prop_assert_eq!(r.micro.pairs, 9);
    }

    #[test]
    fn report_rows_are_consistent(rs in corpus(12, "A")) {
        let es = entries(12);
        for rep in aggregate_by_dataset(&rs, &es).unwrap() {
            for fam in &rep.families {
                for row in &fam.rows {
                    prop_assert!(row.absolute <= row.denominator);
                    prop_assert_eq!(row.denominator, fam.denominator);
                    let children = &row.label.node().children;
                    if !children.is_empty() {
                        let counts: Vec<usize> = children.iter().map(|c| fam.row(*c).unwrap().absolute).collect();
                        prop_assert!(row.absolute >= *counts.iter().max().unwrap());
                        prop_assert!(row.absolute <= counts.iter().sum());
                    }
                }
                let recs: Vec<&AnnotationRecord> = rs
                    .iter()
                    .filter(|r| es.iter().any(|e| e.id == r.entry_id && Some(e.dataset) == rep.dataset))
                    .collect();
                let expect = match fam.denominator_kind {
                    Denominator::AllRecords => recs.len(),
                    Denominator::Answerable => recs.iter().filter(|r| !r.answer_type.contains(&unanswerable())).count(),
                    Denominator::WithSupportingFacts => recs.iter().filter(|r| !r.supporting_facts.is_empty()).count(),
                };
                prop_assert_eq!(fam.denominator, expect);
            }
        }
    }

    #[test]
    fn metric_identities(s in "[A-Za-z0-9 ,.-]{0,30}") {
        prop_assert_eq!(exact_match(&s, &s), 1);
        let f = token_f1(&s, &s);
        if mrc_audit::scoring::normalize_answer(&s, Default::default()).is_empty() {
            prop_assert_eq!(f.f1, 0.0);
        } else {
            prop_assert_eq!((f.precision, f.recall, f.f1), (1.0, 1.0, 1.0));
        }
    }

    #[test]
    fn token_f1_is_symmetric_under_swap(a in "[a-d ]{0,12}", b in "[a-d ]{0,12}") {
        let ab = token_f1(&a, &b);
        let ba = token_f1(&b, &a);
        prop_assert_eq!(ab.precision, ba.recall);
        prop_assert_eq!(ab.recall, ba.precision);
        prop_assert_eq!(ab.f1, ba.f1);
    }
}

#[test]
fn report_examples() {
    let es: Vec<GoldEntry> = (0..50).map(|i| entry(&format!("e{i:02}"), Dataset::NewsQA)).collect();
    let span = LabelId::parse("AnswerType/Span").unwrap();
    let intuitive = LabelId::parse("Knowledge/Intuitive").unwrap();
    let rs: Vec<AnnotationRecord> = (0..50)
        .map(|i| {
            let mut r = AnnotationRecord::new(format!("e{i:02}"), "A");
            if i < 20 {
                r.answer_type.insert(unanswerable());
            } else {
                r.answer_type.insert(span);
                if i < 23 {
                    r.knowledge.insert(intuitive);
                }
            }
            r
        })
        .collect();
    let rep = aggregate(&rs, &es).unwrap();
    assert_eq!(rep.dataset, Some(Dataset::NewsQA));
    let row = rep.row(span);
    assert_eq!((row.absolute, row.relative().as_str()), (30, "60.0"));
    let k = rep.row(taxonomy().root(Family::Knowledge));
    assert_eq!((k.absolute, k.denominator, k.relative().as_str()), (3, 30, "10.0"));
    let none = rep.row(LabelId::parse("AnswerType/Paraphrasing").unwrap());
    assert_eq!((none.absolute, none.relative().as_str()), (0, "0.0"));
}

#[test]
fn report_rejects_invalid_records() {
    let es = vec![entry("e00", Dataset::DROP)];
    let mut r = AnnotationRecord::new("e00", "A");
    r.answer_type.insert(unanswerable());
    r.reasoning.insert(LabelId::parse("Reasoning/Operational/Bridge").unwrap());
    assert!(matches!(aggregate(&[r.clone()], &es), Err(AggregateError::Invalid { .. })));
    let ok = AnnotationRecord { reasoning: Default::default(), ..r };
    assert!(matches!(aggregate(&[ok.clone(), ok.clone()], &es), Err(AggregateError::DuplicateRecord(_))));
    let stray = AnnotationRecord { entry_id: "zz".into(), ..ok };
    assert!(matches!(aggregate(&[stray], &es), Err(AggregateError::UnknownEntry(_))));
}
