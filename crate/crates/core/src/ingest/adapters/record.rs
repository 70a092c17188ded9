//! ReCoRd: `{"data": [{"id", "passage": {"text", "entities"}, "qas": [...]}]}`.
//! The article summary becomes the single passage and every query a Cloze
//! answer whose filler is the gold entity text. Entity and answer offsets are
//! inclusive code-point ranges in the official file; they are kept in extras
//! as byte ranges.

use serde::Deserialize;
use serde_json::json;

use super::{char_to_byte, entry_err, json_values, parse_err, typed, Extras};
use crate::ingest::entry::{Answer, Dataset, GoldEntry, Passage};
use crate::ingest::IngestError;

#[derive(Deserialize)]
struct Doc {
    data: Vec<serde_json::Value>,
}

#[derive(Deserialize)]
struct Article {
    id: String,
    #[serde(default)]
    source: Option<String>,
    passage: RawPassage,
    qas: Vec<Qa>,
}

#[derive(Deserialize)]
struct RawPassage {
    text: String,
    #[serde(default)]
    entities: Vec<Offsets>,
}

#[derive(Deserialize, Clone, Copy)]
struct Offsets {
    start: usize,
    end: usize,
}

#[derive(Deserialize)]
struct Qa {
    id: String,
    query: String,
    #[serde(default)]
    answers: Vec<RawAnswer>,
}

#[derive(Deserialize)]
struct RawAnswer {
    start: usize,
    end: usize,
    text: String,
}

fn byte_range(text: &str, o: Offsets) -> Option<(usize, usize)> {
    Some((char_to_byte(text, o.start)?, char_to_byte(text, o.end + 1)?))
}

pub(crate) fn load(src: &[u8]) -> Result<Vec<GoldEntry>, IngestError> {
    let mut out = Vec::new();
    for v in json_values(src)? {
        let doc: Doc = typed("ReCoRd document", v)?;
        for (ai, a) in doc.data.into_iter().enumerate() {
            let article: Article = typed(&format!("ReCoRd article {ai}"), a)?;
            convert(article, &mut out)?;
        }
    }
    if out.is_empty() {
        return Err(parse_err("input", "empty input: no queries"));
    }
    Ok(out)
}

fn convert(article: Article, out: &mut Vec<GoldEntry>) -> Result<(), IngestError> {
    let text = &article.passage.text;
    let entities: Vec<Option<(usize, usize)>> =
        article.passage.entities.iter().map(|&o| byte_range(text, o)).collect();
    for qa in article.qas {
        let name = format!("ReCoRd query {}", qa.id);
        let mut fillers: Vec<&str> = Vec::new();
        for a in &qa.answers {
            if !fillers.contains(&a.text.as_str()) {
                fillers.push(&a.text);
            }
        }
        let answers: Vec<Answer> = fillers
            .iter()
            .map(|f| Answer::Cloze { query: qa.query.clone(), filler: f.to_string() })
            .collect();
        let spans: Vec<Option<(usize, usize)>> = qa
            .answers
            .iter()
            .map(|a| byte_range(text, Offsets { start: a.start, end: a.end }))
            .collect();
        let mut extras = Extras::new();
        extras.insert("passage_id".into(), json!(article.id));
        if let Some(s) = &article.source {
            extras.insert("source".into(), json!(s));
        }
        extras.insert("entities".into(), json!(entities));
        extras.insert("answer_spans".into(), json!(spans));
        let entry = GoldEntry::new(
            qa.id.clone(),
            Dataset::ReCoRd,
            qa.query.clone(),
            answers,
            vec![Passage::split(None, text.clone())],
            extras,
        )
        .map_err(|e| entry_err(&name, e))?;
        out.push(entry);
    }
    Ok(())
}
