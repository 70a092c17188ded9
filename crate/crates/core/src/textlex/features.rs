use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::sentences::Sentence;
use super::tokenize::{norms, Token};

/// Compact English function-word list, used only when stopword removal is
/// switched on.
pub const STOPWORDS: &[&str] = &[
    "a", "an", "the", "and", "or", "but", "if", "of", "at", "by", "for", "with", "about", "to",
    "from", "in", "on", "into", "over", "under", "is", "are", "was", "were", "be", "been",
    "being", "has", "have", "had", "do", "does", "did", "it", "its", "this", "that", "these",
    "those", "as", "what", "which", "who", "whom", "whose", "when", "where", "why", "how",
    "i", "you", "he", "she", "we", "they", "him", "her", "them", "his", "their", "our", "not",
    "no", "so", "than", "then", "there", "can", "will", "would", "should", "could",
];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureConfig {
    pub remove_stopwords: bool,
}

/// The five lexical-cue features of one (question, sentence) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Distinct normalized word types shared by question and sentence.
    pub joint_words: usize,
    /// Length in tokens of the longest contiguous shared n-gram.
    pub longest_ngram: usize,
    /// Some question unigram occurs in this sentence and no other.
    pub unique_unigram: bool,
    /// Some question bigram occurs in this sentence and no other.
    pub unique_bigram: bool,
    pub sentence_index: usize,
}

impl FeatureVector {
    pub const DIM: usize = 5;
    pub const NAMES: [&'static str; 5] =
        ["joint_words", "longest_ngram", "unique_unigram", "unique_bigram", "sentence_index"];

    pub fn to_array(&self) -> [f64; 5] {
        [
            self.joint_words as f64,
            self.longest_ngram as f64,
            f64::from(u8::from(self.unique_unigram)),
            f64::from(u8::from(self.unique_bigram)),
            self.sentence_index as f64,
        ]
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FeatureError {
    #[error("sentence {index} is not a member of the given passage sentences")]
    NotInPassage { index: usize },
}

fn filtered(words: Vec<&str>, config: FeatureConfig) -> Vec<&str> {
    if config.remove_stopwords {
        words.into_iter().filter(|w| !STOPWORDS.contains(w)).collect()
    } else {
        words
    }
}

/// Longest common contiguous subsequence length.
pub fn longest_common_ngram(a: &[&str], b: &[&str]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    let mut best = 0;
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { 0 };
            best = best.max(cur[j + 1]);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    best
}

/// Feature extraction over one context, with n-gram document frequencies
/// computed once for all sentences.
pub struct ContextIndex<'a> {
    question: Vec<&'a str>,
    question_types: HashSet<&'a str>,
    question_bigrams: HashSet<(&'a str, &'a str)>,
    sentences: Vec<Vec<&'a str>>,
    unigram_df: HashMap<&'a str, usize>,
    bigram_df: HashMap<(&'a str, &'a str), usize>,
}

impl<'a> ContextIndex<'a> {
    pub fn new(question: &'a [Token], sentences: &'a [Sentence], config: FeatureConfig) -> Self {
        let question = filtered(norms(question), config);
        let question_types: HashSet<&str> = question.iter().copied().collect();
        let question_bigrams: HashSet<(&str, &str)> =
            question.windows(2).map(|w| (w[0], w[1])).collect();
        let sentences: Vec<Vec<&str>> =
            sentences.iter().map(|s| filtered(s.norms(), config)).collect();
        let mut unigram_df = HashMap::new();
        let mut bigram_df = HashMap::new();
        for s in &sentences {
            let uni: HashSet<&str> = s.iter().copied().filter(|w| question_types.contains(w)).collect();
            for w in uni {
                *unigram_df.entry(w).or_insert(0) += 1;
            }
            let bi: HashSet<(&str, &str)> =
                s.windows(2).map(|w| (w[0], w[1])).filter(|b| question_bigrams.contains(b)).collect();
            for b in bi {
                *bigram_df.entry(b).or_insert(0) += 1;
            }
        }
        ContextIndex { question, question_types, question_bigrams, sentences, unigram_df, bigram_df }
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }

    /// Features of the sentence at `index` within the context.
    pub fn features(&self, index: usize) -> FeatureVector {
        let words = &self.sentences[index];
        let types: HashSet<&str> = words.iter().copied().collect();
        let joint_words = types.intersection(&self.question_types).count();
        let unique_unigram = types
            .iter()
            .any(|w| self.question_types.contains(w) && self.unigram_df.get(w) == Some(&1));
        let unique_bigram = words.windows(2).any(|w| {
            let b = (w[0], w[1]);
            self.question_bigrams.contains(&b) && self.bigram_df.get(&b) == Some(&1)
        });
        FeatureVector {
            joint_words,
            longest_ngram: longest_common_ngram(&self.question, words),
            unique_unigram,
            unique_bigram,
            sentence_index: index,
        }
    }

    pub fn all(&self) -> Vec<FeatureVector> {
        (0..self.len()).map(|i| self.features(i)).collect()
    }
}

pub fn overlap_features(
    question: &[Token],
    sentence: &Sentence,
    passage_sentences: &[Sentence],
) -> Result<FeatureVector, FeatureError> {
    overlap_features_with(question, sentence, passage_sentences, FeatureConfig::default())
}

/// Features of `sentence` against `question`, with uniqueness judged
/// against every sentence of `passage_sentences`. `sentence.index` must be
/// its position in that list.
pub fn overlap_features_with(
    question: &[Token],
    sentence: &Sentence,
    passage_sentences: &[Sentence],
    config: FeatureConfig,
) -> Result<FeatureVector, FeatureError> {
    let index = sentence.index;
    if passage_sentences.get(index) != Some(sentence) {
        return Err(FeatureError::NotInPassage { index });
    }
    Ok(ContextIndex::new(question, passage_sentences, config).features(index))
}
