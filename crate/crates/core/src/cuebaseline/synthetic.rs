//! Generated corpora with known lexical-cue structure, for calibrating the
//! baseline.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::loo::AnnotatedEntry;
use crate::ingest::{Answer, Dataset, GoldEntry, Passage, SentenceRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparableSpec {
    pub entries: usize,
    pub sentences: usize,
    /// Supporting facts per entry; must not exceed `sentences`.
    pub facts: usize,
    pub seed: u64,
}

impl Default for SeparableSpec {
    fn default() -> Self {
        SeparableSpec { entries: 30, sentences: 6, facts: 3, seed: 0 }
    }
}

fn word(i: usize) -> String {
    const ON: [&str; 8] = ["b", "d", "k", "l", "m", "r", "s", "t"];
    const NU: [&str; 5] = ["a", "e", "i", "o", "u"];
    let mut out = String::new();
    let mut n = i + 1;
    while n > 0 {
        out.push_str(ON[n % 8]);
        out.push_str(NU[(n / 8) % 5]);
        n /= 40;
    }
    out
}

/// Builds entries where each supporting fact, and no other sentence, shares
/// a bigram with the question. Distractor sentences share isolated question
/// words but never two adjacent ones.
pub fn separable_corpus(spec: &SeparableSpec, dataset: Dataset) -> Vec<AnnotatedEntry> {
    assert!(spec.facts <= spec.sentences, "more facts than sentences");
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let vocab: Vec<String> = (0..4000).map(word).collect();
    (0..spec.entries)
        .map(|e| {
            let mut pool: Vec<usize> = (0..vocab.len()).collect();
            pool.shuffle(&mut rng);
            let q_len = 2 * spec.facts + 2;
            let question: Vec<&str> = pool[..q_len].iter().map(|&i| vocab[i].as_str()).collect();
            let filler: Vec<&str> = pool[q_len..].iter().map(|&i| vocab[i].as_str()).collect();
            let pick = |rng: &mut ChaCha8Rng| filler[rng.random_range(0..filler.len())];

            let mut slots: Vec<usize> = (0..spec.sentences).collect();
            slots.shuffle(&mut rng);
            let fact_slots: BTreeSet<usize> = slots[..spec.facts].iter().copied().collect();
            let mut next_fact = 0;
            let mut sentences = Vec::with_capacity(spec.sentences);
            for s in 0..spec.sentences {
                let mut words: Vec<&str> = Vec::new();
                for _ in 0..rng.random_range(2..5) {
                    words.push(pick(&mut rng));
                }
                if fact_slots.contains(&s) {
                    words.push(question[2 * next_fact]);
                    words.push(question[2 * next_fact + 1]);
                    next_fact += 1;
                } else {
                    for _ in 0..rng.random_range(0..3) {
                        words.push(question[rng.random_range(0..q_len)]);
                        words.push(pick(&mut rng));
                    }
                }
                for _ in 0..rng.random_range(1..4) {
                    words.push(pick(&mut rng));
                }
                sentences.push(format!("{}. ", words.join(" ")));
            }
            let entry = GoldEntry::new(
                format!("syn-{e:04}"),
                dataset,
                format!("{}?", question.join(" ")),
                vec![Answer::FreeForm { text: pick(&mut rng).to_string() }],
                vec![Passage::from_sentences(None, &sentences)],
                BTreeMap::new(),
            )
            .expect("generated entries are well formed");
            AnnotatedEntry {
                entry,
                supporting_facts: fact_slots.into_iter().map(|s| SentenceRef::new(0, s)).collect(),
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn words_are_distinct() {
        let w: BTreeSet<String> = (0..4000).map(word).collect();
        assert_eq!(w.len(), 4000);
    }

    #[test]
    fn shape() {
        let c = separable_corpus(&SeparableSpec { entries: 4, sentences: 5, facts: 2, seed: 3 }, Dataset::DROP);
        assert_eq!(c.len(), 4);
        for a in &c {
            assert_eq!(a.entry.sentence_count(), 5);
            assert_eq!(a.supporting_facts.len(), 2);
        }
    }
}
