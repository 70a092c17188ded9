use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textlex::{tokenize, Sentence, Token, TokenizerConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Dataset {
    MSMarco,
    HotpotQA,
    ReCoRd,
    MultiRC,
    NewsQA,
    DROP,
}

impl Dataset {
    pub const ALL: [Dataset; 6] = [
        Dataset::MSMarco,
        Dataset::HotpotQA,
        Dataset::ReCoRd,
        Dataset::MultiRC,
        Dataset::NewsQA,
        Dataset::DROP,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Dataset::MSMarco => "MSMarco",
            Dataset::HotpotQA => "HotpotQA",
            Dataset::ReCoRd => "ReCoRd",
            Dataset::MultiRC => "MultiRC",
            Dataset::NewsQA => "NewsQA",
            Dataset::DROP => "DROP",
        }
    }
}

impl fmt::Display for Dataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown dataset `{0}` (expected one of msmarco, hotpotqa, record, multirc, newsqa, drop)")]
pub struct UnknownDataset(pub String);

impl FromStr for Dataset {
    type Err = UnknownDataset;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Dataset::ALL
            .into_iter()
            .find(|d| d.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| UnknownDataset(s.to_string()))
    }
}

/// (passage index, sentence index within that passage).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "(usize, usize)", into = "(usize, usize)")]
pub struct SentenceRef {
    pub passage: usize,
    pub sentence: usize,
}

impl SentenceRef {
    pub fn new(passage: usize, sentence: usize) -> Self {
        SentenceRef { passage, sentence }
    }
}

impl From<(usize, usize)> for SentenceRef {
    fn from((passage, sentence): (usize, usize)) -> Self {
        SentenceRef { passage, sentence }
    }
}

impl From<SentenceRef> for (usize, usize) {
    fn from(r: SentenceRef) -> Self {
        (r.passage, r.sentence)
    }
}

impl fmt::Display for SentenceRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.passage, self.sentence)
    }
}

/// A passage with its precomputed sentence boundaries (byte offsets).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Passage {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub text: String,
    pub sentences: Vec<(usize, usize)>,
}

impl Passage {
    /// Splits `text` with the default sentence splitter.
    pub fn split(title: Option<String>, text: String) -> Self {
        let sentences = crate::textlex::sentence_spans(&text)
            .into_iter()
            .map(|r| (r.start, r.end))
            .collect();
        Passage { title, text, sentences }
    }

    /// Builds a passage from pre-split sentences, joined verbatim.
    pub fn from_sentences<S: AsRef<str>>(title: Option<String>, parts: &[S]) -> Self {
        let mut text = String::new();
        let mut sentences = Vec::with_capacity(parts.len());
        for p in parts {
            let start = text.len();
            text.push_str(p.as_ref());
            sentences.push((start, text.len()));
        }
        Passage { title, text, sentences }
    }

    pub fn sentence_count(&self) -> usize {
        self.sentences.len()
    }

    pub fn sentence_text(&self, i: usize) -> Option<&str> {
        self.sentences.get(i).map(|&(s, e)| &self.text[s..e])
    }

    pub fn sentences_with(&self, config: TokenizerConfig) -> Vec<Sentence> {
        self.sentences
            .iter()
            .enumerate()
            .map(|(i, &(s, e))| Sentence::from_span(&self.text, i, s..e, config))
            .collect()
    }

    fn check(&self, p: usize) -> Result<(), String> {
        if self.sentences.is_empty() {
            return Err(format!("passage {p} has no sentences"));
        }
        let mut last = 0;
        for (i, &(s, e)) in self.sentences.iter().enumerate() {
            if s < last || s > e || e > self.text.len() {
                return Err(format!("passage {p} sentence {i} has invalid bounds {s}..{e}"));
            }
            if !self.text.is_char_boundary(s) || !self.text.is_char_boundary(e) {
                return Err(format!("passage {p} sentence {i} bounds split a character"));
            }
            last = e;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Answer {
    /// A byte range of one passage's text.
    Span { passage: usize, start: usize, end: usize, text: String },
    FreeForm { text: String },
    /// `query` carries the placeholder, `filler` restores it.
    Cloze { query: String, filler: String },
    MultipleChoice { choices: Vec<String>, correct: Vec<usize> },
    Unanswerable,
}

impl Answer {
    /// Text forms usable as gold strings for answer scoring.
    pub fn gold_texts(&self) -> Vec<&str> {
        match self {
            Answer::Span { text, .. } | Answer::FreeForm { text } => vec![text.as_str()],
            Answer::Cloze { filler, .. } => vec![filler.as_str()],
            Answer::MultipleChoice { choices, correct } => {
                correct.iter().filter_map(|&i| choices.get(i).map(String::as_str)).collect()
            }
            Answer::Unanswerable => Vec::new(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("entry `{id}`: {message}")]
pub struct EntryError {
    pub id: String,
    pub message: String,
}

/// One (question, answers, passages) triple in canonical form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEntry")]
pub struct GoldEntry {
    pub id: String,
    pub dataset: Dataset,
    pub question: String,
    pub answers: Vec<Answer>,
    pub passages: Vec<Passage>,
    /// Format-specific fields kept for lossless ingestion.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extras: BTreeMap<String, serde_json::Value>,
}

#[derive(Deserialize)]
struct RawEntry {
    id: String,
    dataset: Dataset,
    question: String,
    answers: Vec<Answer>,
    passages: Vec<Passage>,
    #[serde(default)]
    extras: BTreeMap<String, serde_json::Value>,
}

impl TryFrom<RawEntry> for GoldEntry {
    type Error = EntryError;

    fn try_from(r: RawEntry) -> Result<Self, Self::Error> {
        GoldEntry::new(r.id, r.dataset, r.question, r.answers, r.passages, r.extras)
    }
}

impl GoldEntry {
    pub fn new(
        id: String,
        dataset: Dataset,
        question: String,
        answers: Vec<Answer>,
        passages: Vec<Passage>,
        extras: BTreeMap<String, serde_json::Value>,
    ) -> Result<Self, EntryError> {
        let entry = GoldEntry { id, dataset, question, answers, passages, extras };
        entry.check().map_err(|message| EntryError { id: entry.id.clone(), message })?;
        Ok(entry)
    }

    fn check(&self) -> Result<(), String> {
        if self.passages.is_empty() {
            return Err("no passages".into());
        }
        for (i, p) in self.passages.iter().enumerate() {
            p.check(i)?;
        }
        if !self.question_tokens().iter().any(Token::is_word) {
            return Err("question has no word tokens".into());
        }
        for a in &self.answers {
            match a {
                Answer::Span { passage, start, end, text } => {
                    let p = self
                        .passages
                        .get(*passage)
                        .ok_or_else(|| format!("span answer references missing passage {passage}"))?;
                    if p.text.get(*start..*end) != Some(text.as_str()) {
                        return Err(format!(
                            "span answer {start}..{end} does not match `{text}` in passage {passage}"
                        ));
                    }
                }
                Answer::MultipleChoice { choices, correct } => {
                    if let Some(i) = correct.iter().find(|&&i| i >= choices.len()) {
                        return Err(format!(
                            "correct choice {i} out of range for {} choices",
                            choices.len()
                        ));
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn question_tokens(&self) -> Vec<Token> {
        tokenize(&self.question)
    }

    pub fn sentence_count(&self) -> usize {
        self.passages.iter().map(Passage::sentence_count).sum()
    }

    pub fn has_sentence(&self, r: SentenceRef) -> bool {
        self.passages.get(r.passage).is_some_and(|p| r.sentence < p.sentence_count())
    }

    /// Location of every context sentence, in global order.
    pub fn sentence_refs(&self) -> Vec<SentenceRef> {
        self.passages
            .iter()
            .enumerate()
            .flat_map(|(p, passage)| (0..passage.sentence_count()).map(move |s| SentenceRef::new(p, s)))
            .collect()
    }

    pub fn global_index(&self, r: SentenceRef) -> Option<usize> {
        if !self.has_sentence(r) {
            return None;
        }
        Some(self.passages[..r.passage].iter().map(Passage::sentence_count).sum::<usize>() + r.sentence)
    }

    /// All context sentences with indices global across passages.
    pub fn context_sentences(&self, config: TokenizerConfig) -> Vec<Sentence> {
        let mut out = Vec::with_capacity(self.sentence_count());
        for p in &self.passages {
            for mut s in p.sentences_with(config) {
                s.index = out.len();
                out.push(s);
            }
        }
        out
    }

    /// Paragraph identity used for uniqueness: the concatenated passage text.
    pub fn paragraph_key(&self) -> String {
        let mut key = String::new();
        for (i, p) in self.passages.iter().enumerate() {
            if i > 0 {
                key.push('\n');
            }
            key.push_str(&p.text);
        }
        key
    }
}

#[derive(Debug, Error)]
pub enum CanonicalError {
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Reads the canonical line-delimited entry format.
pub fn read_entries<R: BufRead>(reader: R) -> Result<Vec<GoldEntry>, CanonicalError> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line).map_err(|source| CanonicalError::Json { line: i + 1, source })?,
        );
    }
    Ok(out)
}

pub fn write_entries<W: Write>(mut writer: W, entries: &[GoldEntry]) -> std::io::Result<()> {
    for e in entries {
        serde_json::to_writer(&mut writer, e)?;
        writer.write_all(b"\n")?;
    }
    writer.flush()
}
