//! NewsQA, combined JSON (`combined-newsqa-data-v1.json`): stories with
//! their questions, crowd answers and a `consensus` field. The consensus
//! span (code-point offsets, end exclusive) becomes the answer; `noAnswer`
//! and `badQuestion` consensus map to `Unanswerable`. Stories whose `type`
//! is not `dev` are skipped unless all splits are requested.

use serde::Deserialize;
use serde_json::{json, Value};

use super::{char_to_byte, entry_err, json_values, parse_err, typed, Extras, LoadOptions};
use crate::ingest::entry::{Answer, Dataset, GoldEntry, Passage};
use crate::ingest::IngestError;

#[derive(Deserialize)]
struct Doc {
    data: Vec<Value>,
}

#[derive(Deserialize)]
struct Story {
    #[serde(rename = "storyId")]
    story_id: String,
    text: String,
    #[serde(rename = "type", default)]
    split: Option<String>,
    questions: Vec<Value>,
}

#[derive(Deserialize)]
struct Question {
    q: String,
    #[serde(default)]
    consensus: Value,
    #[serde(default)]
    answers: Option<Value>,
    #[serde(default, rename = "validatedAnswers")]
    validated_answers: Option<Value>,
    #[serde(default, rename = "isAnswerAbsent")]
    is_answer_absent: Option<Value>,
    #[serde(default, rename = "isQuestionBad")]
    is_question_bad: Option<Value>,
}

pub(crate) fn load(src: &[u8], options: LoadOptions) -> Result<Vec<GoldEntry>, IngestError> {
    let mut out = Vec::new();
    for v in json_values(src)? {
        let doc: Doc = typed("NewsQA document", v)?;
        for (si, s) in doc.data.into_iter().enumerate() {
            let story: Story = typed(&format!("NewsQA story {si}"), s)?;
            if !options.all_splits && story.split.as_deref().is_some_and(|t| t != "dev") {
                continue;
            }
            convert(story, &mut out)?;
        }
    }
    if out.is_empty() {
        return Err(parse_err("input", "empty input: no development questions"));
    }
    Ok(out)
}

fn consensus_answer(text: &str, consensus: &Value) -> Result<Answer, String> {
    if consensus.get("noAnswer").is_some() || consensus.get("badQuestion").is_some() {
        return Ok(Answer::Unanswerable);
    }
    let (Some(s), Some(e)) = (
        consensus.get("s").and_then(Value::as_u64),
        consensus.get("e").and_then(Value::as_u64),
    ) else {
        return Err(format!("unrecognised consensus `{consensus}`"));
    };
    let start = char_to_byte(text, s as usize).ok_or("consensus start out of range")?;
    let end = char_to_byte(text, e as usize).ok_or("consensus end out of range")?;
    if start > end {
        return Err(format!("consensus {s}..{e} is reversed"));
    }
    Ok(Answer::Span { passage: 0, start, end, text: text[start..end].to_string() })
}

fn convert(story: Story, out: &mut Vec<GoldEntry>) -> Result<(), IngestError> {
    let passage = Passage::split(None, story.text.clone());
    for (qi, q) in story.questions.into_iter().enumerate() {
        let id = format!("{}#{qi}", story.story_id);
        let name = format!("NewsQA question {id}");
        let q: Question = typed(&name, q)?;
        let answer = consensus_answer(&story.text, &q.consensus).map_err(|m| parse_err(&name, m))?;
        let mut extras = Extras::new();
        extras.insert("story_id".into(), json!(story.story_id));
        extras.insert("consensus".into(), q.consensus.clone());
        for (k, v) in [
            ("answers", q.answers),
            ("validatedAnswers", q.validated_answers),
            ("isAnswerAbsent", q.is_answer_absent),
            ("isQuestionBad", q.is_question_bad),
        ] {
            if let Some(v) = v {
                extras.insert(k.into(), v);
            }
        }
        let entry = GoldEntry::new(id, Dataset::NewsQA, q.q, vec![answer], vec![passage.clone()], extras)
            .map_err(|e| entry_err(&name, e))?;
        out.push(entry);
    }
    Ok(())
}
