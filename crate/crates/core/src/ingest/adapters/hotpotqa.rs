//! HotpotQA, distractor setting: a JSON array of items, each with ten
//! context paragraphs given as `[title, [sentence, ...]]`. The sentences are
//! kept exactly as distributed so sentence indices match the gold
//! `supporting_facts`.

use serde::Deserialize;
use serde_json::{json, Value};

use super::{entry_err, json_values, parse_err, span_or_free, typed, Extras};
use crate::ingest::entry::{Answer, Dataset, GoldEntry, Passage, SentenceRef};
use crate::ingest::IngestError;

#[derive(Deserialize)]
struct Item {
    #[serde(rename = "_id")]
    id: String,
    question: String,
    answer: String,
    #[serde(default)]
    supporting_facts: Vec<(String, usize)>,
    context: Vec<(String, Vec<String>)>,
    #[serde(rename = "type", default)]
    kind: Option<String>,
    #[serde(default)]
    level: Option<String>,
}

pub(crate) fn load(src: &[u8]) -> Result<Vec<GoldEntry>, IngestError> {
    let mut items = Vec::new();
    for v in json_values(src)? {
        match v {
            Value::Array(a) => items.extend(a),
            other => items.push(other),
        }
    }
    if items.is_empty() {
        return Err(parse_err("input", "empty input: no items"));
    }
    items
        .into_iter()
        .enumerate()
        .map(|(i, v)| {
            let name = format!("HotpotQA item {i}");
            let item: Item = typed(&name, v)?;
            let name = format!("HotpotQA item {i} ({})", item.id);
            convert(item).map_err(|e| match e {
                IngestError::Parse { message, .. } => parse_err(name, message),
                other => other,
            })
        })
        .collect()
}

fn convert(item: Item) -> Result<GoldEntry, IngestError> {
    let passages: Vec<Passage> = item
        .context
        .iter()
        .map(|(title, sents)| Passage::from_sentences(Some(title.clone()), sents))
        .collect();

    let answer = match item.answer.as_str() {
        "yes" | "no" => Answer::FreeForm { text: item.answer.clone() },
        a => span_or_free(&passages, a),
    };

    let mut extras = Extras::new();
    if let Some(k) = &item.kind {
        extras.insert("type".into(), json!(k));
    }
    if let Some(l) = &item.level {
        extras.insert("level".into(), json!(l));
    }
    if !item.supporting_facts.is_empty() {
        extras.insert("supporting_facts".into(), json!(item.supporting_facts));
        // Resolved against context titles; facts that do not resolve are dropped here
        // but remain in the raw list above.
        let resolved: Vec<SentenceRef> = item
            .supporting_facts
            .iter()
            .filter_map(|(title, s)| {
                let p = item.context.iter().position(|(t, _)| t == title)?;
                (*s < passages[p].sentence_count()).then_some(SentenceRef::new(p, *s))
            })
            .collect();
        extras.insert("gold_supporting_facts".into(), json!(resolved));
    }

    GoldEntry::new(item.id.clone(), Dataset::HotpotQA, item.question, vec![answer], passages, extras)
        .map_err(|e| entry_err(&item.id, e))
}
