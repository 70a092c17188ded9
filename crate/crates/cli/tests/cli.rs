mod common;

use std::path::{Path, PathBuf};

use common::*;
use mrc_audit::cuebaseline::synthetic::{separable_corpus, SeparableSpec};
use mrc_audit::ingest::{read_entries, Dataset, SentenceRef};
use mrc_audit::schema::AnnotationRecord;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn stdout(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &std::process::Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn ingest_writes_entries_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("hotpot.jsonl");
    let input = fixture("hotpotqa_fig1.json");
    let out = run(&["ingest", "--dataset", "hotpotqa", "--input", path_str(&input), "-o", path_str(&out_path)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let entries = read_entries(std::io::BufReader::new(std::fs::File::open(&out_path).unwrap())).unwrap();
    assert!(!entries.is_empty());
    assert!(entries.iter().all(|e| e.dataset == Dataset::HotpotQA));

    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("hotpot.jsonl.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "ingest");
    assert_eq!(manifest["flags"]["dataset"], "hotpotqa");
    let digest = manifest["inputs"][input.display().to_string()].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert!(manifest["created_at"].as_str().unwrap().ends_with('Z'));
}

#[test]
fn ingest_to_stdout_has_no_sidecar() {
    let input = fixture("multirc_small.json");
    let out = run(&["ingest", "--dataset", "multirc", "--input", path_str(&input)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let entries = read_entries(&out.stdout[..]).unwrap();
    assert!(entries.iter().all(|e| e.dataset == Dataset::MultiRC));
}

#[test]
fn sample_respects_size_and_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("pool.jsonl");
    write_entry_file(&e, &pool(120, 120));
    let out = run(&["sample", "--entries", path_str(&e), "--n", "10", "--dataset", "drop", "--seed", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let picked = read_entries(&out.stdout[..]).unwrap();
    assert_eq!(picked.len(), 10);
    assert!(picked.iter().all(|x| x.dataset == Dataset::DROP));
}

#[test]
fn sample_fails_when_pool_is_too_small() {
    let dir = tempfile::tempdir().unwrap();
    let e = dir.path().join("pool.jsonl");
    write_entry_file(&e, &pool(30, 5));
    let out = run(&["sample", "--entries", path_str(&e), "--n", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error:"));
    let shared = run(&["sample", "--entries", path_str(&e), "--n", "10", "--allow-shared-paragraphs"]);
    assert!(shared.status.success(), "{}", stderr(&shared));
}

fn one_entry(dir: &Path) -> PathBuf {
    let e = dir.join("entries.jsonl");
    write_entry_file(&e, &[simple_entry("e1", Dataset::DROP, "The Patriots won. It rained.")]);
    e
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let e = one_entry(dir.path());
    let r = dir.path().join("records.jsonl");

    let mut good = AnnotationRecord::new("e1", "A");
    good.answer_type.insert(label("AnswerType/Span"));
    good.supporting_facts.insert(SentenceRef::new(0, 0));
    write_record_file(&r, &[good.clone()]);
    let out = run(&["validate", "--entries", path_str(&e), "--records", path_str(&r)]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("e1\tA\tok"));

    let mut bad = AnnotationRecord::new("e1", "B");
    bad.answer_type.insert(label("AnswerType/Unanswerable"));
    bad.supporting_facts.insert(SentenceRef::new(0, 1));
    write_record_file(&r, &[good, bad]);
    let out = run(&["--format", "machine", "validate", "--entries", path_str(&e), "--records", path_str(&r)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("1 of 2 records failed validation"));
    let lines: Vec<Value> = stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[1]["valid"], false);
    assert!(!lines[1]["errors"].as_array().unwrap().is_empty());
}

#[test]
fn usage_and_input_errors() {
    let out = run(&["baseline", "--entries"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["report", "--entries", "/nonexistent/e.jsonl", "--records", "/nonexistent/r.jsonl"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("/nonexistent/e.jsonl"));
}

#[test]
fn features_table_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = separable_corpus(&SeparableSpec { entries: 2, ..SeparableSpec::default() }, Dataset::NewsQA);
    let (e, r) = write_annotated(dir.path(), "f", &corpus);
    let out = run(&["features", "--entries", path_str(&e), "--records", path_str(&r)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split('\t').collect();
    assert_eq!(header.first(), Some(&"entry_id"));
    assert_eq!(header.last(), Some(&"supporting"));
    assert_eq!(header.len(), 3 + 5 + 1);
    let rows: Vec<&str> = lines.collect();
    let sentences: usize = corpus.iter().map(|a| a.entry.sentence_count()).sum();
    assert_eq!(rows.len(), sentences);
    let supporting = rows.iter().filter(|r| r.ends_with("\t1")).count();
    assert_eq!(supporting, corpus.iter().map(|a| a.supporting_facts.len()).sum::<usize>());

    let out = run(&["--format", "machine", "features", "--entries", path_str(&e)]);
    let first: Value = serde_json::from_str(stdout(&out).lines().next().unwrap()).unwrap();
    assert!(first["features"]["joint_words"].is_u64());
    assert!(first.get("supporting").is_none());
}

#[test]
fn baseline_table_and_machine() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = separable_corpus(&SeparableSpec { entries: 10, ..SeparableSpec::default() }, Dataset::ReCoRd);
    let (e, r) = write_annotated(dir.path(), "b", &corpus);
    let out = run(&["baseline", "--entries", path_str(&e), "--records", path_str(&r), "--runs", "2"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("Dataset"));
    assert!(text.contains("ReCoRd"));
    assert!(text.contains(" ± "));

    let out_path = dir.path().join("b.json");
    let out = run(&[
        "--format", "machine", "baseline", "--entries", path_str(&e), "--records", path_str(&r), "--class-weight",
        "balanced", "-o", path_str(&out_path),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert_eq!(v["results"][0]["dataset"], "ReCoRd");
    assert_eq!(v["config"]["runs"], 5);
    assert!(dir.path().join("b.json.manifest.json").exists());
}

#[test]
fn report_table_and_chart() {
    let dir = tempfile::tempdir().unwrap();
    let (entries, records) = frequency_fixture();
    let e = dir.path().join("e.jsonl");
    let r = dir.path().join("r.jsonl");
    write_entry_file(&e, &entries);
    write_record_file(&r, &records);
    let chart = dir.path().join("chart.tsv");
    let out = run(&["report", "--entries", path_str(&e), "--records", path_str(&r), "--chart", path_str(&chart)]);
    assert!(out.status.success(), "{}", stderr(&out));
    let table = stdout(&out);
    let span = table.lines().find(|l| l.trim_start().starts_with("Span ")).unwrap();
    assert!(span.contains("38 76.0"), "{span}");

    let series = std::fs::read_to_string(&chart).unwrap();
    let mut lines = series.lines();
    assert_eq!(lines.next(), Some("family\tlabel\tdataset\tpercentage"));
    assert!(series.lines().any(|l| l == "AnswerType\tAnswerType/Span\tNewsQA\t76.0"), "{series}");
    assert!(dir.path().join("chart.tsv.manifest.json").exists());
}

#[test]
fn agreement_between_two_annotators() {
    let dir = tempfile::tempdir().unwrap();
    let e = one_entry(dir.path());
    let mut a = AnnotationRecord::new("e1", "A");
    a.answer_type.insert(label("AnswerType/Span"));
    a.supporting_facts.insert(SentenceRef::new(0, 0));
    let mut b = a.clone();
    b.annotator_id = "B".into();
    b.supporting_facts = [SentenceRef::new(0, 1)].into();
    let ra = dir.path().join("a.jsonl");
    let rb = dir.path().join("b.jsonl");
    write_record_file(&ra, &[a]);
    write_record_file(&rb, &[b]);
    let out = run(&[
        "--format", "machine", "agreement", "--entries", path_str(&e), "--records", path_str(&ra), path_str(&rb),
        "--first", "A", "--second", "B",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["micro"]["f1"], 0.5);

    let out = run(&["agreement", "--entries", path_str(&e), "--records", path_str(&ra), path_str(&rb), "--first", "A", "--second", "B"]);
    let micro = stdout(&out).lines().find(|l| l.starts_with("Micro")).unwrap().to_string();
    assert!(micro.ends_with("0.50"), "{micro}");
}

#[test]
fn serve_reads_tokens_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let e = one_entry(dir.path());
    let tokens = dir.path().join("tokens.toml");
    write_tokens(&tokens);
    let log = dir.path().join("log.jsonl");
    let server = Server::start(&e, &log, &tokens);

    let (status, _) = http(&server.addr, "GET", "/tasks", None, None).unwrap();
    assert_eq!(status, 401);
    let (status, body) = http(&server.addr, "GET", "/tasks", Some("tok-a"), None).unwrap();
    assert_eq!(status, 200);
    assert!(body.contains("e1"));
    let record = r#"{"schema_version":"1.0","answer_type":["AnswerType/Span"],"supporting_facts":[[0,0]]}"#;
    let (status, body) = http(&server.addr, "PUT", "/tasks/e1/annotation", Some("tok-b"), Some(record)).unwrap();
    assert_eq!(status, 200, "{body}");
    server.kill();

    // state survives a restart
    let server = Server::start(&e, &log, &tokens);
    let (status, body) = http(&server.addr, "GET", "/export", Some("tok-a"), None).unwrap();
    assert_eq!(status, 200);
    assert!(body.contains("\"annotator_id\":\"B\""), "{body}");
}

#[test]
fn serve_without_tokens_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let e = one_entry(dir.path());
    let log = dir.path().join("log.jsonl");
    let out = run(&["serve", "--entries", path_str(&e), "--log", path_str(&log)]);
    assert_eq!(out.status.code(), Some(2));
}
