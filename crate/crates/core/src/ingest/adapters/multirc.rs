//! MultiRC. The original release is `{"data": [{"id", "paragraph": {"text",
//! "questions": [...]}}]}` with sentences marked as `<b>Sent N: </b>...<br>`;
//! the SuperGLUE repackaging is one `{"idx", "passage": {...}}` object per
//! line with `label` instead of `isAnswer`. Both are accepted. Each question
//! becomes one entry whose answer lists every choice with the variable set
//! of correct ones.

use serde::Deserialize;
use serde_json::{json, Value};

use super::{entry_err, json_values, parse_err, typed, Extras};
use crate::ingest::entry::{Answer, Dataset, GoldEntry, Passage};
use crate::ingest::IngestError;

#[derive(Deserialize)]
struct Paragraph {
    text: String,
    questions: Vec<Question>,
}

#[derive(Deserialize)]
struct Question {
    question: String,
    #[serde(default)]
    idx: Option<Value>,
    #[serde(default)]
    sentences_used: Option<Value>,
    #[serde(default)]
    multisentence: Option<bool>,
    answers: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    text: String,
    #[serde(default, rename = "isAnswer")]
    is_answer: Option<bool>,
    #[serde(default)]
    label: Option<i64>,
}

/// Sentences from `<b>Sent N: </b>` markup, if present.
fn marked_sentences(text: &str) -> Option<Vec<String>> {
    if !text.contains("<b>Sent ") {
        return None;
    }
    let parts: Vec<String> = text
        .split("<br>")
        .map(|piece| {
            let piece = piece.trim();
            match piece.strip_prefix("<b>Sent ").and_then(|r| r.split_once("</b>")) {
                Some((_, rest)) => rest.trim().to_string(),
                None => piece.to_string(),
            }
        })
        .filter(|p| !p.is_empty())
        .collect();
    (!parts.is_empty()).then_some(parts)
}

fn passage(text: &str) -> Passage {
    match marked_sentences(text) {
        Some(parts) => {
            let n = parts.len();
            let joined: Vec<String> = parts
                .into_iter()
                .enumerate()
                .map(|(i, p)| if i + 1 < n { p + " " } else { p })
                .collect();
            Passage::from_sentences(None, &joined)
        }
        None => Passage::split(None, text.to_string()),
    }
}

fn idx_string(v: &Option<Value>, fallback: usize) -> String {
    match v {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        _ => fallback.to_string(),
    }
}

pub(crate) fn load(src: &[u8]) -> Result<Vec<GoldEntry>, IngestError> {
    let mut out = Vec::new();
    for (vi, v) in json_values(src)?.into_iter().enumerate() {
        if let Some(Value::Array(data)) = v.get("data") {
            for (i, item) in data.iter().enumerate() {
                let id = item.get("id").and_then(Value::as_str).map(str::to_string).unwrap_or_else(|| i.to_string());
                let para: Paragraph = typed(
                    &format!("MultiRC paragraph {id}"),
                    item.get("paragraph").cloned().unwrap_or(Value::Null),
                )?;
                convert(&id, para, &mut out)?;
            }
        } else {
            let id = idx_string(&v.get("idx").cloned(), vi);
            let para: Paragraph = typed(
                &format!("MultiRC paragraph {id}"),
                v.get("passage").cloned().unwrap_or(Value::Null),
            )?;
            convert(&id, para, &mut out)?;
        }
    }
    if out.is_empty() {
        return Err(parse_err("input", "empty input: no questions"));
    }
    Ok(out)
}

fn convert(pid: &str, para: Paragraph, out: &mut Vec<GoldEntry>) -> Result<(), IngestError> {
    let p = passage(&para.text);
    for (qi, q) in para.questions.into_iter().enumerate() {
        let id = format!("{pid}#{}", idx_string(&q.idx, qi));
        let name = format!("MultiRC question {id}");
        let choices: Vec<String> = q.answers.iter().map(|c| c.text.clone()).collect();
        let correct: Vec<usize> = q
            .answers
            .iter()
            .enumerate()
            .filter(|(_, c)| c.is_answer.unwrap_or(false) || c.label == Some(1))
            .map(|(i, _)| i)
            .collect();
        let mut extras = Extras::new();
        extras.insert("paragraph_id".into(), json!(pid));
        if let Some(s) = &q.sentences_used {
            extras.insert("sentences_used".into(), s.clone());
        }
        if let Some(m) = q.multisentence {
            extras.insert("multisentence".into(), json!(m));
        }
        let entry = GoldEntry::new(
            id,
            Dataset::MultiRC,
            q.question,
            vec![Answer::MultipleChoice { choices, correct }],
            vec![p.clone()],
            extras,
        )
        .map_err(|e| entry_err(&name, e))?;
        out.push(entry);
    }
    Ok(())
}
