//! Helpers shared by the CLI test targets: running the binary, building
//! fixture files, and talking to a spawned `serve` process.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::TcpStream;
use std::path::{Path, PathBuf};
use std::process::{Child, Command, Output, Stdio};
use std::time::Duration;

use mrc_audit::cuebaseline::AnnotatedEntry;
use mrc_audit::ingest::{write_entries, Answer, Dataset, GoldEntry, Passage};
use mrc_audit::schema::{write_records, AnnotationRecord, CorrectnessJudgement, LabelId};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mrc-audit")
}

pub fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).env_remove("MRC_AUDIT_TOKENS").output().expect("binary runs")
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

pub fn write_entry_file(path: &Path, entries: &[GoldEntry]) {
    let mut f = std::fs::File::create(path).unwrap();
    write_entries(&mut f, entries).unwrap();
}

pub fn write_record_file(path: &Path, records: &[AnnotationRecord]) {
    let mut f = std::fs::File::create(path).unwrap();
    write_records(&mut f, records).unwrap();
}

pub fn simple_entry(id: &str, dataset: Dataset, text: &str) -> GoldEntry {
    GoldEntry::new(
        id.into(),
        dataset,
        "Which team won?".into(),
        vec![Answer::FreeForm { text: "Patriots".into() }],
        vec![Passage::split(None, text.into())],
        BTreeMap::new(),
    )
    .unwrap()
}

/// `n` entries over `distinct` different paragraphs.
pub fn pool(n: usize, distinct: usize) -> Vec<GoldEntry> {
    (0..n)
        .map(|i| simple_entry(&format!("p{i:04}"), Dataset::ALL[i % 6], &format!("Paragraph {}. It ends.", i % distinct)))
        .collect()
}

/// Writes a generated corpus as an entry file and a record file (annotator `A`).
pub fn write_annotated(dir: &Path, name: &str, corpus: &[AnnotatedEntry]) -> (PathBuf, PathBuf) {
    let entries: Vec<GoldEntry> = corpus.iter().map(|a| a.entry.clone()).collect();
    let records: Vec<AnnotationRecord> = corpus
        .iter()
        .map(|a| {
            let mut r = AnnotationRecord::new(a.entry.id.clone(), "A");
            r.answer_type.insert(label("AnswerType/Span"));
            r.supporting_facts = a.supporting_facts.clone();
            r
        })
        .collect();
    let e = dir.join(format!("{name}.entries.jsonl"));
    let r = dir.join(format!("{name}.records.jsonl"));
    write_entry_file(&e, &entries);
    write_record_file(&r, &records);
    (e, r)
}

pub fn label(path: &str) -> LabelId {
    LabelId::parse(path).unwrap()
}

/// Column order of the published frequency tables.
pub const COLUMNS: [Dataset; 6] =
    [Dataset::MSMarco, Dataset::HotpotQA, Dataset::ReCoRd, Dataset::MultiRC, Dataset::NewsQA, Dataset::DROP];

/// Published label-frequency rows as printed: row name, then `abs rel` per column.
pub const ANSWER_ROWS: &str = "
Answer         | 50 100.0 | 50 100.0 | 50 100.0 | 50 100.0 | 50 100.0 | 50 100.0
Span           | 25 50.0  | 49 98.0  | 50 100.0 | 36 72.0  | 38 76.0  | 20 40.0
Paraphrasing   | 4 8.0    | 0 0.0    | 0 0.0    | 24 48.0  | 0 0.0    | 0 0.0
Unanswerable   | 20 40.0  | 0 0.0    | 0 0.0    | 0 0.0    | 12 24.0  | 0 0.0
Abstraction    | 1 2.0    | 1 2.0    | 0 0.0    | 12 24.0  | 0 0.0    | 31 62.0
";

pub const CORRECTNESS_ROWS: &str = "
Correctness    | 23 46.0  | 13 26.0  | 4 8.0    | 19 38.0  | 21 42.0  | 5 10.0
Debatable      | 17 34.0  | 12 24.0  | 4 8.0    | 14 28.0  | 16 32.0  | 5 10.0
ArbSelection   | 9 18.0   | 2 4.0    | 0 0.0    | 0 0.0    | 5 10.0   | 1 2.0
ArbPrecision   | 3 6.0    | 5 10     | 1 2.0    | 4 8.0    | 7 14.0   | 2 4.0
Conjunction    | 0 0.0    | 0 0      | 0 0.0    | 5 10.0   | 0 0.0    | 0 0.0
Other          | 5 10.0   | 5 10     | 3 6.0    | 5 10.0   | 4 8.0    | 2 4.0
Wrong          | 6 12.0   | 1 2.0    | 0 0.0    | 5 10.0   | 5 10.0   | 0 0.0
";

pub const KNOWLEDGE_ROWS: &str = "
Knowledge      | 3 10.0   | 8 16.0   | 19 38.0  | 11 22.0  | 6 15.8   | 20 40.0
World          | 0 0.0    | 3 6.0    | 12 24.0  | 3 6.0    | 1 2.6    | 6 12.0
Cultural       | 0 0.0    | 1 2.0    | 3 6.0    | 1 2.0    | 0 0.0    | 0 0.0
Geographical   | 0 0.0    | 0 0.0    | 2 4.0    | 0 0.0    | 1 2.6    | 0 0.0
Legal          | 0 0.0    | 0 0.0    | 2 4.0    | 0 0.0    | 0 0.0    | 0 0.0
Political      | 0 0.0    | 1 2.0    | 2 4.0    | 0 0.0    | 0 0.0    | 1 2.0
Technical      | 0 0.0    | 0 0.0    | 1 2.0    | 2 4.0    | 0 0.0    | 0 0.0
DomainSpecific | 0 0.0    | 1 2.0    | 2 4.0    | 0 0.0    | 0 0.0    | 5 10.0
Intuitive      | 3 10.0   | 5 10.0   | 9 18.0   | 8 16.0   | 5 13.2   | 14 28.0
";

#[derive(Debug, Clone)]
pub struct RefRow {
    pub name: String,
    /// (absolute, relative as printed) per column.
    pub cells: Vec<(usize, String)>,
}

pub fn parse_rows(src: &str) -> Vec<RefRow> {
    src.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| {
            let mut parts = l.split('|').map(str::trim);
            let name = parts.next().unwrap().to_string();
            let cells = parts
                .map(|c| {
                    let (a, r) = c.split_once(' ').unwrap();
                    (a.parse().unwrap(), r.trim().to_string())
                })
                .collect();
            RefRow { name, cells }
        })
        .collect()
}

pub fn ref_row<'a>(rows: &'a [RefRow], name: &str) -> &'a RefRow {
    rows.iter().find(|r| r.name == name).unwrap_or_else(|| panic!("no row {name}"))
}

fn count(rows: &[RefRow], name: &str, col: usize) -> usize {
    ref_row(rows, name).cells[col].0
}

/// Lays `blocks` of (label, count) over `slots` back to back, wrapping
/// around, so each label lands on exactly `count` distinct slots.
fn lay_out(slots: &[usize], start: usize, blocks: &[(LabelId, usize)], mut put: impl FnMut(usize, LabelId)) {
    let mut cursor = start;
    for (l, n) in blocks {
        for k in 0..*n {
            put(slots[(cursor + k) % slots.len()], *l);
        }
        cursor += n;
    }
}

/// Synthetic records (annotator `A`) reproducing the published frequency counts: 50
/// records per dataset.
pub fn frequency_fixture() -> (Vec<GoldEntry>, Vec<AnnotationRecord>) {
    let answers = parse_rows(ANSWER_ROWS);
    let correctness = parse_rows(CORRECTNESS_ROWS);
    let knowledge = parse_rows(KNOWLEDGE_ROWS);
    let mut entries = Vec::new();
    let mut records = Vec::new();
    for (col, d) in COLUMNS.into_iter().enumerate() {
        let base = records.len();
        for i in 0..50 {
            let id = format!("{}-{i:02}", d.name());
            entries.push(simple_entry(&id, d, "The Pats won. It was close."));
            records.push(AnnotationRecord::new(id, "A"));
        }
        let recs = &mut records[base..];
        let all: Vec<usize> = (0..50).collect();

        let at = [
            ("Span", "AnswerType/Span"),
            ("Paraphrasing", "AnswerType/Paraphrasing"),
            ("Unanswerable", "AnswerType/Unanswerable"),
            ("Abstraction", "AnswerType/Generated"),
        ]
        .map(|(row, path)| (label(path), count(&answers, row, col)));
        lay_out(&all, 0, &at, |i, l| {
            recs[i].answer_type.insert(l);
        });

        let corr = [
            ("ArbSelection", "Correctness/Debatable/ArbitrarySelection"),
            ("ArbPrecision", "Correctness/Debatable/ArbitraryPrecision"),
            ("Conjunction", "Correctness/Debatable/ConjunctionOrIsolated"),
            ("Other", "Correctness/Debatable/Other"),
            ("Wrong", "Correctness/Wrong/AnswerPresent"),
        ]
        .map(|(row, path)| (label(path), count(&correctness, row, col)));
        lay_out(&all, 0, &corr, |i, l| {
            recs[i].correctness = Some(CorrectnessJudgement { label: l, note: "see passage".into() });
        });

        let unanswerable = label("AnswerType/Unanswerable");
        let answerable: Vec<usize> = (0..50).filter(|i| !recs[*i].answer_type.contains(&unanswerable)).collect();
        let geo = label("Knowledge/Factual/GeoPoliticalLegal");
        let world = [
            ("Cultural", label("Knowledge/Factual/CulturalHistoric")),
            ("Geographical", geo),
            ("Legal", geo),
            ("Political", geo),
            ("Technical", label("Knowledge/Factual/TechnicalScientific")),
            ("DomainSpecific", label("Knowledge/Factual/OtherDomainSpecific")),
        ]
        .map(|(row, l)| (l, count(&knowledge, row, col)));
        lay_out(&answerable, 0, &world, |i, l| {
            recs[i].knowledge.insert(l);
        });
        // Intuitive ends where the Knowledge total says it must, so any
        // excess over the block sum overlaps the tail of the World block.
        let intuitive = count(&knowledge, "Intuitive", col);
        let start = count(&knowledge, "Knowledge", col) - intuitive;
        lay_out(&answerable, start, &[(label("Knowledge/Intuitive"), intuitive)], |i, l| {
            recs[i].knowledge.insert(l);
        });
    }
    (entries, records)
}

/// An HTTP/1.1 exchange over a fresh connection.
pub fn http(addr: &str, method: &str, path: &str, token: Option<&str>, body: Option<&str>) -> std::io::Result<(u16, String)> {
    let mut s = TcpStream::connect(addr)?;
    s.set_read_timeout(Some(Duration::from_secs(10)))?;
    let body = body.unwrap_or("");
    let mut req = format!("{method} {path} HTTP/1.1\r\nHost: {addr}\r\nConnection: close\r\nContent-Length: {}\r\n", body.len());
    if let Some(t) = token {
        req.push_str(&format!("Authorization: Bearer {t}\r\n"));
    }
    req.push_str("\r\n");
    req.push_str(body);
    s.write_all(req.as_bytes())?;
    let mut raw = Vec::new();
    s.read_to_end(&mut raw)?;
    let text = String::from_utf8_lossy(&raw).into_owned();
    let (head, rest) = text
        .split_once("\r\n\r\n")
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::UnexpectedEof, "truncated response"))?;
    let status = head
        .split_whitespace()
        .nth(1)
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidData, "bad status line"))?;
    Ok((status, rest.to_string()))
}

/// A running `serve` process, killed on drop.
pub struct Server {
    pub child: Child,
    pub addr: String,
}

impl Server {
    pub fn start(entries: &Path, log: &Path, tokens: &Path) -> Server {
        let mut child = Command::new(bin())
            .args(["serve", "--entries", path_str(entries), "--log", path_str(log), "--addr", "127.0.0.1:0"])
            .env("MRC_AUDIT_TOKENS", tokens)
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .expect("serve starts");
        let mut line = String::new();
        BufReader::new(child.stdout.take().unwrap()).read_line(&mut line).unwrap();
        assert!(!line.trim().is_empty(), "serve exited before printing its address");
        Server { child, addr: line.trim().to_string() }
    }

    /// SIGKILL on Unix: no shutdown hooks run.
    pub fn kill(mut self) {
        self.child.kill().unwrap();
        self.child.wait().unwrap();
    }
}

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

pub fn write_tokens(path: &Path) {
    std::fs::write(path, "[annotators]\nA = \"tok-a\"\nB = \"tok-b\"\n").unwrap();
}
