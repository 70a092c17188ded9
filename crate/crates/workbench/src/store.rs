//! Append-only annotation log and the latest-record view folded from it.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use log::warn;
use mrc_audit::schema::AnnotationRecord;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Action {
    Claim,
    Submit { record: Box<AnnotationRecord> },
}

/// One line of the log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Event {
    pub seq: u64,
    /// RFC 3339, UTC.
    pub at: String,
    pub annotator: String,
    pub entry_id: String,
    #[serde(flatten)]
    pub action: Action,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Unclaimed,
    InProgress,
    Submitted,
}

impl std::str::FromStr for TaskStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "unclaimed" => Ok(TaskStatus::Unclaimed),
            "in_progress" => Ok(TaskStatus::InProgress),
            "submitted" => Ok(TaskStatus::Submitted),
            other => Err(format!("unknown status `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskState {
    pub entry_id: String,
    pub status: TaskStatus,
    pub annotator: Option<String>,
    /// Present exactly when `status` is `Submitted`.
    pub record: Option<AnnotationRecord>,
    pub updated_at: Option<String>,
}

/// Latest state per (entry_id, annotator_id).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct View {
    tasks: BTreeMap<(String, String), TaskState>,
}

impl View {
    pub fn replay<'a>(events: impl IntoIterator<Item = &'a Event>) -> Self {
        let mut v = View::default();
        for e in events {
            v.apply(e);
        }
        v
    }

    pub fn apply(&mut self, e: &Event) {
        let key = (e.entry_id.clone(), e.annotator.clone());
        match &e.action {
            Action::Claim => {
                self.tasks.entry(key).or_insert_with(|| TaskState {
                    entry_id: e.entry_id.clone(),
                    status: TaskStatus::InProgress,
                    annotator: Some(e.annotator.clone()),
                    record: None,
                    updated_at: Some(e.at.clone()),
                });
            }
            Action::Submit { record } => {
                self.tasks.insert(
                    key,
                    TaskState {
                        entry_id: e.entry_id.clone(),
                        status: TaskStatus::Submitted,
                        annotator: Some(e.annotator.clone()),
                        record: Some(record.as_ref().clone()),
                        updated_at: Some(e.at.clone()),
                    },
                );
            }
        }
    }

    pub fn get(&self, entry_id: &str, annotator: &str) -> Option<&TaskState> {
        self.tasks.get(&(entry_id.to_string(), annotator.to_string()))
    }

    /// Tasks for one entry, ordered by annotator.
    pub fn for_entry<'a>(&'a self, entry_id: &'a str) -> impl Iterator<Item = &'a TaskState> + 'a {
        self.tasks
            .range((entry_id.to_string(), String::new())..)
            .take_while(move |((e, _), _)| e == entry_id)
            .map(|(_, t)| t)
    }

    pub fn iter(&self) -> impl Iterator<Item = &TaskState> {
        self.tasks.values()
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("log {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("log {path} line {line} is corrupt: {message}")]
    Corrupt { path: PathBuf, line: usize, message: String },
}

/// Reads every complete event. A final line without its newline, or one
/// that fails to parse, is treated as a write interrupted by a crash and is
/// reported as the byte length of the valid prefix.
pub fn read_log(path: &Path) -> Result<(Vec<Event>, u64, bool), StoreError> {
    let io_err = |source| StoreError::Io { path: path.to_path_buf(), source };
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == io::ErrorKind::NotFound => return Ok((Vec::new(), 0, false)),
        Err(e) => return Err(io_err(e)),
    };
    let mut reader = BufReader::new(file);
    let mut events = Vec::new();
    let mut good = 0u64;
    let mut buf = Vec::new();
    let mut line = 0;
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf).map_err(io_err)?;
        if n == 0 {
            return Ok((events, good, false));
        }
        line += 1;
        let complete = buf.ends_with(b"\n");
        let parsed = std::str::from_utf8(&buf)
            .map_err(|e| e.to_string())
            .and_then(|s| serde_json::from_str::<Event>(s.trim_end()).map_err(|e| e.to_string()));
        match parsed {
            Ok(e) if complete => {
                events.push(e);
                good += n as u64;
            }
            Ok(_) => return Ok((events, good, true)),
            Err(message) => {
                let mut rest = Vec::new();
                io::Read::read_to_end(&mut reader, &mut rest).map_err(io_err)?;
                if rest.is_empty() {
                    return Ok((events, good, true));
                }
                return Err(StoreError::Corrupt { path: path.to_path_buf(), line, message });
            }
        }
    }
}

/// Single-writer store. Every append is flushed and fsynced before the call
/// returns.
#[derive(Debug)]
pub struct Store {
    path: PathBuf,
    file: File,
    events: Vec<Event>,
    view: View,
}

impl Store {
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let path = path.into();
        let (events, good, torn) = read_log(&path)?;
        let io_err = |source| StoreError::Io { path: path.clone(), source };
        let file = OpenOptions::new().create(true).append(true).open(&path).map_err(io_err)?;
        if torn {
            warn!("discarding an incomplete final line in {}", path.display());
            file.set_len(good).map_err(io_err)?;
            file.sync_all().map_err(io_err)?;
        }
        let view = View::replay(&events);
        Ok(Store { path, file, events, view })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn view(&self) -> &View {
        &self.view
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    fn append(&mut self, annotator: &str, entry_id: &str, action: Action) -> Result<&Event, StoreError> {
        let event = Event {
            seq: self.events.last().map_or(1, |e| e.seq + 1),
            at: Utc::now().to_rfc3339_opts(SecondsFormat::Micros, true),
            annotator: annotator.to_string(),
            entry_id: entry_id.to_string(),
            action,
        };
        let mut line = serde_json::to_vec(&event).expect("events always serialize");
        line.push(b'\n');
        let io_err = |source| StoreError::Io { path: self.path.clone(), source };
        self.file.write_all(&line).map_err(io_err)?;
        self.file.sync_data().map_err(io_err)?;
        self.view.apply(&event);
        self.events.push(event);
        Ok(self.events.last().expect("just pushed"))
    }

    /// Marks the task in progress. Returns false when the annotator already
    /// holds it; nothing is logged then.
    pub fn claim(&mut self, annotator: &str, entry_id: &str) -> Result<bool, StoreError> {
        if self.view.get(entry_id, annotator).is_some() {
            return Ok(false);
        }
        self.append(annotator, entry_id, Action::Claim)?;
        Ok(true)
    }

    pub fn submit(&mut self, annotator: &str, record: AnnotationRecord) -> Result<&Event, StoreError> {
        let entry_id = record.entry_id.clone();
        self.append(annotator, &entry_id, Action::Submit { record: Box::new(record) })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(e: &str, a: &str) -> AnnotationRecord {
        AnnotationRecord::new(e, a)
    }

    #[test]
    fn claim_then_submit() {
        let dir = tempfile::tempdir().unwrap();
        let mut s = Store::open(dir.path().join("log.jsonl")).unwrap();
        assert!(s.claim("A", "e1").unwrap());
        assert!(!s.claim("A", "e1").unwrap());
        assert_eq!(s.view().get("e1", "A").unwrap().status, TaskStatus::InProgress);
        s.submit("A", rec("e1", "A")).unwrap();
        assert_eq!(s.view().get("e1", "A").unwrap().status, TaskStatus::Submitted);
        assert!(!s.claim("A", "e1").unwrap());
        assert_eq!(s.events().len(), 2);
    }

    #[test]
    fn reopen_reproduces_view() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("log.jsonl");
        let view = {
            let mut s = Store::open(&p).unwrap();
            s.submit("A", rec("e1", "A")).unwrap();
            s.submit("B", rec("e1", "B")).unwrap();
            s.claim("A", "e2").unwrap();
            s.view().clone()
        };
        let s = Store::open(&p).unwrap();
        assert_eq!(s.view(), &view);
        assert_eq!(s.view().for_entry("e1").count(), 2);
        assert_eq!(s.events().last().unwrap().seq, 3);
    }

    #[test]
    fn torn_tail_is_discarded() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("log.jsonl");
        {
            let mut s = Store::open(&p).unwrap();
            s.submit("A", rec("e1", "A")).unwrap();
        }
        let mut f = OpenOptions::new().append(true).open(&p).unwrap();
        f.write_all(br#"{"seq":2,"at":"x","annot"#).unwrap();
        drop(f);
        let mut s = Store::open(&p).unwrap();
        assert_eq!(s.events().len(), 1);
        s.claim("A", "e2").unwrap();
        drop(s);
        let s = Store::open(&p).unwrap();
        assert_eq!(s.events().len(), 2);
        assert_eq!(s.events()[1].seq, 2);
    }

    #[test]
    fn corruption_in_the_middle_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("log.jsonl");
        {
            let mut s = Store::open(&p).unwrap();
            s.submit("A", rec("e1", "A")).unwrap();
        }
        let good = std::fs::read(&p).unwrap();
        let mut bad = b"garbage\n".to_vec();
        bad.extend(good);
        std::fs::write(&p, bad).unwrap();
        assert!(matches!(Store::open(&p), Err(StoreError::Corrupt { line: 1, .. })));
    }
}
