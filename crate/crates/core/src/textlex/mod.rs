//! Tokenization, sentence splitting and the lexical-overlap features used
//! by the supporting-fact cue baseline.
//!
//! Everything here is deliberately shallow: whitespace tokens, case folding,
//! punctuation trimming. No lemmas, no embeddings, no parses.

mod features;
mod sentences;
mod tokenize;

pub use features::{
    longest_common_ngram, overlap_features, overlap_features_with, ContextIndex, FeatureConfig,
    FeatureError, FeatureVector, STOPWORDS,
};
pub use sentences::{sentence_spans, split_sentences, split_sentences_with, Sentence, ABBREVIATIONS};
pub use tokenize::{norms, normalize_word, tokenize, tokenize_range, tokenize_with, Token, TokenizerConfig};
