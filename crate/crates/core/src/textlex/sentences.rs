use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::tokenize::{tokenize_range, Token, TokenizerConfig};

/// Words that end in a period without ending a sentence. Compared
/// case-insensitively against the whitespace-delimited word carrying the
/// period.
pub const ABBREVIATIONS: &[&str] = &[
    "mr.", "mrs.", "ms.", "dr.", "prof.", "sr.", "jr.", "st.", "mt.", "ft.", "gen.", "col.",
    "lt.", "capt.", "sgt.", "gov.", "sen.", "rep.", "rev.", "hon.", "vs.", "etc.", "e.g.",
    "i.e.", "cf.", "inc.", "ltd.", "co.", "corp.", "no.", "nos.", "vol.", "fig.", "approx.",
    "jan.", "feb.", "mar.", "apr.", "jun.", "jul.", "aug.", "sep.", "sept.", "oct.", "nov.",
    "dec.", "u.s.", "u.k.", "u.n.", "d.c.", "a.m.", "p.m.",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    /// 0-based position within the sequence it was taken from.
    pub index: usize,
    /// Byte range into the source text.
    pub span: Range<usize>,
    pub raw: String,
    pub tokens: Vec<Token>,
}

impl Sentence {
    pub fn from_span(text: &str, index: usize, span: Range<usize>, config: TokenizerConfig) -> Self {
        Sentence {
            index,
            raw: text[span.clone()].to_string(),
            tokens: tokenize_range(text, span.clone(), config),
            span,
        }
    }

    pub fn norms(&self) -> Vec<&str> {
        super::tokenize::norms(&self.tokens)
    }
}

const CLOSERS: &[char] = &['"', '\'', ')', ']', '”', '’'];
const OPENERS: &[char] = &['"', '\'', '(', '[', '“', '‘'];

fn is_abbreviation(text: &str, period_at: usize) -> bool {
    let word_start = text[..period_at]
        .rfind(char::is_whitespace)
        .map(|i| i + text[i..].chars().next().unwrap().len_utf8())
        .unwrap_or(0);
    let word = text[word_start..=period_at].trim_start_matches(OPENERS).to_lowercase();
    ABBREVIATIONS.contains(&word.as_str())
}

/// Sentence boundaries as byte ranges.
///
/// A sentence ends at `.`, `?` or `!` (plus any closing quotes) followed by
/// whitespace and an uppercase letter or digit, unless the word carrying a
/// single period is listed in [`ABBREVIATIONS`]. Line breaks always end a
/// sentence. The ranges are contiguous and cover the whole text; the
/// whitespace after a boundary belongs to the preceding sentence.
pub fn sentence_spans(text: &str) -> Vec<Range<usize>> {
    if text.is_empty() {
        return Vec::new();
    }
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut spans = Vec::new();
    let mut start = 0;
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if matches!(c, '.' | '?' | '!') {
            let mut j = i + 1;
            while j < chars.len() && matches!(chars[j].1, '.' | '?' | '!') {
                j += 1;
            }
            while j < chars.len() && CLOSERS.contains(&chars[j].1) {
                j += 1;
            }
            let ws_start = j;
            while j < chars.len() && chars[j].1.is_whitespace() {
                j += 1;
            }
            let mut k = j;
            while k < chars.len() && OPENERS.contains(&chars[k].1) {
                k += 1;
            }
            let upper_next = k < chars.len() && {
                let n = chars[k].1;
                n.is_uppercase() || n.is_ascii_digit()
            };
            let line_break = j < chars.len() && chars[ws_start..j].iter().any(|&(_, c)| c == '\n');
            let boundary = line_break
                || (j > ws_start
                    && upper_next
                    && !(c == '.' && ws_start == i + 1 && is_abbreviation(text, pos)));
            if boundary {
                let next = chars[j].0;
                spans.push(start..next);
                start = next;
                i = j;
                continue;
            }
            i = j.max(i + 1);
            continue;
        }
        if c == '\n' && !text[start..pos].trim().is_empty() {
            let mut j = i;
            while j < chars.len() && chars[j].1.is_whitespace() {
                j += 1;
            }
            if j < chars.len() {
                let next = chars[j].0;
                spans.push(start..next);
                start = next;
            }
            i = j;
            continue;
        }
        i += 1;
    }
    spans.push(start..text.len());
    spans
}

pub fn split_sentences(text: &str) -> Vec<Sentence> {
    split_sentences_with(text, TokenizerConfig::default())
}

pub fn split_sentences_with(text: &str, config: TokenizerConfig) -> Vec<Sentence> {
    sentence_spans(text)
        .into_iter()
        .enumerate()
        .map(|(i, span)| Sentence::from_span(text, i, span, config))
        .collect()
}
