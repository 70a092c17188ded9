//! Readers for the official development-set distributions.
//!
//! Each adapter maps every input item to exactly one [`GoldEntry`].
//! Format-specific fields that the canonical model does not cover go to the
//! entry's `extras` bag.

mod drop;
mod hotpotqa;
mod msmarco;
mod multirc;
mod newsqa;
mod record;

use std::collections::BTreeMap;

use serde::de::DeserializeOwned;
use serde_json::Value;

use super::entry::{Answer, EntryError, Passage};
use super::IngestError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LoadOptions {
    /// Keep items whose split marker is not `dev` (NewsQA's combined file
    /// carries all splits).
    pub all_splits: bool,
}


pub(crate) use drop::load as load_drop;
pub(crate) use hotpotqa::load as load_hotpotqa;
pub(crate) use msmarco::load as load_msmarco;
pub(crate) use multirc::load as load_multirc;
pub(crate) use newsqa::load as load_newsqa;
pub(crate) use record::load as load_record;

pub(crate) type Extras = BTreeMap<String, Value>;

fn parse_err(item: impl Into<String>, message: impl ToString) -> IngestError {
    IngestError::Parse { item: item.into(), message: message.to_string() }
}

fn entry_err(item: &str, e: EntryError) -> IngestError {
    parse_err(item, e.message)
}

/// Every top-level JSON value in `src` (a single document or a stream of
/// concatenated/line-delimited values).
fn json_values(src: &[u8]) -> Result<Vec<Value>, IngestError> {
    let mut out = Vec::new();
    for (i, v) in serde_json::Deserializer::from_slice(src).into_iter::<Value>().enumerate() {
        out.push(v.map_err(|e| parse_err(format!("value {i}"), e))?);
    }
    if out.is_empty() {
        return Err(parse_err("input", "empty input: no items"));
    }
    Ok(out)
}

fn typed<T: DeserializeOwned>(item: &str, v: Value) -> Result<T, IngestError> {
    serde_json::from_value(v).map_err(|e| parse_err(item, e))
}

/// Converts a code-point offset into a byte offset.
fn char_to_byte(text: &str, chars: usize) -> Option<usize> {
    if chars == 0 {
        return Some(0);
    }
    let len = text.chars().count();
    if chars == len {
        return Some(text.len());
    }
    text.char_indices().nth(chars).map(|(b, _)| b)
}

/// First verbatim occurrence of `answer` in the passages, as a span.
fn find_span(passages: &[Passage], answer: &str) -> Option<Answer> {
    if answer.is_empty() {
        return None;
    }
    passages.iter().enumerate().find_map(|(p, passage)| {
        passage.text.find(answer).map(|start| Answer::Span {
            passage: p,
            start,
            end: start + answer.len(),
            text: answer.to_string(),
        })
    })
}

fn span_or_free(passages: &[Passage], answer: &str) -> Answer {
    find_span(passages, answer).unwrap_or_else(|| Answer::FreeForm { text: answer.to_string() })
}
