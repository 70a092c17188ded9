//! DROP: a JSON object keyed by passage id, each with `passage` and
//! `qa_pairs`. Numbers and dates are carried verbatim as free-form text;
//! spans become passage spans where they occur in the passage (question
//! spans fall back to free form).

use serde::Deserialize;
use serde_json::{json, Value};

use super::{entry_err, json_values, parse_err, span_or_free, typed, Extras};
use crate::ingest::entry::{Answer, Dataset, GoldEntry, Passage};
use crate::ingest::IngestError;

#[derive(Deserialize)]
struct Article {
    passage: String,
    qa_pairs: Vec<Value>,
}

#[derive(Deserialize)]
struct QaPair {
    question: String,
    query_id: String,
    answer: RawAnswer,
    #[serde(default)]
    validated_answers: Option<Value>,
}

#[derive(Deserialize, Default)]
struct RawAnswer {
    #[serde(default)]
    number: String,
    #[serde(default)]
    date: DateParts,
    #[serde(default)]
    spans: Vec<String>,
}

#[derive(Deserialize, Default)]
struct DateParts {
    #[serde(default)]
    day: String,
    #[serde(default)]
    month: String,
    #[serde(default)]
    year: String,
}

fn normalize(a: &RawAnswer, passages: &[Passage]) -> Vec<Answer> {
    if !a.number.trim().is_empty() {
        return vec![Answer::FreeForm { text: a.number.clone() }];
    }
    let date: Vec<&str> = [&a.date.day, &a.date.month, &a.date.year]
        .into_iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .collect();
    if !date.is_empty() {
        return vec![Answer::FreeForm { text: date.join(" ") }];
    }
    a.spans.iter().map(|s| span_or_free(passages, s)).collect()
}

pub(crate) fn load(src: &[u8]) -> Result<Vec<GoldEntry>, IngestError> {
    let mut out = Vec::new();
    for v in json_values(src)? {
        let Value::Object(map) = v else {
            return Err(parse_err("DROP document", "expected an object keyed by passage id"));
        };
        for (pid, article) in map {
            let article: Article = typed(&format!("DROP passage {pid}"), article)?;
            let passages = vec![Passage::split(None, article.passage.clone())];
            for (qi, qa) in article.qa_pairs.into_iter().enumerate() {
                let qa: QaPair = typed(&format!("DROP passage {pid} question {qi}"), qa)?;
                let name = format!("DROP question {}", qa.query_id);
                let mut extras = Extras::new();
                extras.insert("passage_id".into(), json!(pid));
                if let Some(v) = qa.validated_answers {
                    extras.insert("validated_answers".into(), v);
                }
                let answers = normalize(&qa.answer, &passages);
                let entry = GoldEntry::new(
                    qa.query_id.clone(),
                    Dataset::DROP,
                    qa.question,
                    answers,
                    passages.clone(),
                    extras,
                )
                .map_err(|e| entry_err(&name, e))?;
                out.push(entry);
            }
        }
    }
    if out.is_empty() {
        return Err(parse_err("input", "empty input: no questions"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn date_and_number_are_free_form() {
        let ps = vec![Passage::split(None, "In 1997 they won 27-24.".into())];
        let num = RawAnswer { number: "3".into(), ..Default::default() };
        assert_eq!(normalize(&num, &ps), vec![Answer::FreeForm { text: "3".into() }]);
        let date = RawAnswer {
            date: DateParts { day: "".into(), month: "May".into(), year: "1997".into() },
            ..Default::default()
        };
        assert_eq!(normalize(&date, &ps), vec![Answer::FreeForm { text: "May 1997".into() }]);
        let spans = RawAnswer { spans: vec!["27-24".into()], ..Default::default() };
        assert!(matches!(normalize(&spans, &ps)[0], Answer::Span { start: 17, .. }));
    }
}
