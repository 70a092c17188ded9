//! MS MARCO QnA. Accepts the v2.1 columnar document (`{"query": {key:
//! text}, "passages": {key: [...]}, ...}`) and the line-per-query form. All
//! ten candidate passages are retained; `is_selected` flags and URLs go to
//! extras.

use serde::Deserialize;
use serde_json::{json, Map, Value};

use super::{entry_err, json_values, parse_err, typed, Extras};
use crate::ingest::entry::{Answer, Dataset, GoldEntry, Passage};
use crate::ingest::IngestError;

pub const NO_ANSWER: &str = "No Answer Present.";

#[derive(Deserialize)]
struct RawPassage {
    passage_text: String,
    #[serde(default)]
    is_selected: Option<i64>,
    #[serde(default)]
    url: Option<String>,
}

#[derive(Deserialize)]
struct Item {
    query: String,
    #[serde(default)]
    query_id: Option<Value>,
    #[serde(default)]
    query_type: Option<String>,
    passages: Vec<RawPassage>,
    #[serde(default)]
    answers: Vec<String>,
    #[serde(default, rename = "wellFormedAnswers")]
    well_formed_answers: Option<Value>,
}

fn is_columnar(v: &Value) -> bool {
    v.get("query").is_some_and(Value::is_object)
}

/// Splits the columnar document into one object per query key.
fn columns_to_rows(doc: Map<String, Value>) -> Result<Vec<(String, Value)>, IngestError> {
    let keys: Vec<String> = doc
        .get("query")
        .and_then(Value::as_object)
        .ok_or_else(|| parse_err("MSMarco document", "missing `query` column"))?
        .keys()
        .cloned()
        .collect();
    Ok(keys
        .into_iter()
        .map(|k| {
            let mut row = Map::new();
            for (col, values) in &doc {
                if let Some(v) = values.get(&k) {
                    row.insert(col.clone(), v.clone());
                }
            }
            (k, Value::Object(row))
        })
        .collect())
}

pub(crate) fn load(src: &[u8]) -> Result<Vec<GoldEntry>, IngestError> {
    let mut rows = Vec::new();
    for (i, v) in json_values(src)?.into_iter().enumerate() {
        if is_columnar(&v) {
            let Value::Object(doc) = v else { unreachable!() };
            rows.extend(columns_to_rows(doc)?);
        } else {
            rows.push((format!("line {i}"), v));
        }
    }
    if rows.is_empty() {
        return Err(parse_err("input", "empty input: no items"));
    }
    rows.into_iter().map(|(key, v)| convert(&key, v)).collect()
}

fn convert(key: &str, v: Value) -> Result<GoldEntry, IngestError> {
    let name = format!("MSMarco item {key}");
    let item: Item = typed(&name, v)?;
    let id = match &item.query_id {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => key.to_string(),
    };
    let name = format!("MSMarco item {key} ({id})");

    let passages: Vec<Passage> =
        item.passages.iter().map(|p| Passage::split(None, p.passage_text.clone())).collect();

    let answers: Vec<Answer> = if item.answers.is_empty()
        || item.answers.iter().all(|a| a.trim() == NO_ANSWER || a.trim().is_empty())
    {
        vec![Answer::Unanswerable]
    } else {
        item.answers
            .iter()
            .filter(|a| a.trim() != NO_ANSWER && !a.trim().is_empty())
            .map(|a| Answer::FreeForm { text: a.clone() })
            .collect()
    };

    let mut extras = Extras::new();
    extras.insert(
        "is_selected".into(),
        json!(item.passages.iter().map(|p| p.is_selected).collect::<Vec<_>>()),
    );
    extras.insert("urls".into(), json!(item.passages.iter().map(|p| &p.url).collect::<Vec<_>>()));
    if let Some(t) = item.query_type {
        extras.insert("query_type".into(), json!(t));
    }
    if let Some(w) = item.well_formed_answers {
        extras.insert("wellFormedAnswers".into(), w);
    }

    GoldEntry::new(id, Dataset::MSMarco, item.query, answers, passages, extras)
        .map_err(|e| entry_err(&name, e))
}
