use std::collections::BTreeMap;

use mrc_audit::schema::AnnotationRecord;
use proptest::prelude::*;
use workbench::{read_log, Store, TaskStatus, View};

#[derive(Debug, Clone)]
enum Op {
    Claim(usize, usize),
    Submit(usize, usize, u8),
    Reopen,
}

const ANNOTATORS: [&str; 3] = ["A", "B", "C"];

fn op() -> impl Strategy<Value = Op> {
    prop_oneof![
        4 => (0..3usize, 0..6usize).prop_map(|(a, e)| Op::Claim(a, e)),
        4 => (0..3usize, 0..6usize, any::<u8>()).prop_map(|(a, e, n)| Op::Submit(a, e, n)),
        1 => Just(Op::Reopen),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The in-memory view, a fresh replay of the file, and a plain model of
    /// latest-wins semantics all agree after any sequence of operations.
    #[test]
    fn view_is_a_fold_of_the_log(ops in prop::collection::vec(op(), 0..40)) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        let mut store = Store::open(&path).unwrap();
        let mut model: BTreeMap<(String, String), (TaskStatus, Option<String>)> = BTreeMap::new();
        for op in ops {
            match op {
                Op::Claim(a, e) => {
                    let key = (format!("e{e}"), ANNOTATORS[a].to_string());
                    let fresh = !model.contains_key(&key);
                    prop_assert_eq!(store.claim(&key.1, &key.0).unwrap(), fresh);
                    model.entry(key).or_insert((TaskStatus::InProgress, None));
                }
                Op::Submit(a, e, n) => {
                    let key = (format!("e{e}"), ANNOTATORS[a].to_string());
                    let mut r = AnnotationRecord::new(key.0.clone(), key.1.clone());
                    r.notes = n.to_string();
                    store.submit(&key.1, r).unwrap();
                    model.insert(key, (TaskStatus::Submitted, Some(n.to_string())));
                }
                Op::Reopen => {
                    drop(store);
                    store = Store::open(&path).unwrap();
                }
            }
            let (events, _, torn) = read_log(&path).unwrap();
            prop_assert!(!torn);
            prop_assert_eq!(&View::replay(&events), store.view());
        }
        let observed: BTreeMap<(String, String), (TaskStatus, Option<String>)> = store
            .view()
            .iter()
            .map(|t| {
                let key = (t.entry_id.clone(), t.annotator.clone().unwrap());
                (key, (t.status, t.record.as_ref().map(|r| r.notes.clone())))
            })
            .collect();
        prop_assert_eq!(observed, model);
        let seqs: Vec<u64> = store.events().iter().map(|e| e.seq).collect();
        prop_assert_eq!(seqs, (1..=store.events().len() as u64).collect::<Vec<_>>());
    }

    /// Cutting the file at any byte keeps every complete event and nothing else.
    #[test]
    fn truncation_anywhere_recovers_a_prefix(ops in prop::collection::vec((0..3usize, 0..4usize), 1..10), cut in any::<prop::sample::Index>()) {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.jsonl");
        let full = {
            let mut s = Store::open(&path).unwrap();
            for (a, e) in ops {
                s.submit(ANNOTATORS[a], AnnotationRecord::new(format!("e{e}"), ANNOTATORS[a])).unwrap();
            }
            s.events().to_vec()
        };
        let bytes = std::fs::read(&path).unwrap();
        let at = cut.index(bytes.len() + 1);
        std::fs::write(&path, &bytes[..at]).unwrap();
        let kept = bytes[..at].iter().filter(|b| **b == b'\n').count();
        let s = Store::open(&path).unwrap();
        prop_assert_eq!(s.events(), &full[..kept]);
        let prefix: usize = bytes.split_inclusive(|b| *b == b'\n').take(kept).map(<[u8]>::len).sum();
        prop_assert_eq!(std::fs::metadata(&path).unwrap().len(), prefix as u64);
    }
}
