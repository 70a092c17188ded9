use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::{Body, Bytes};
use axum::extract::{FromRequestParts, Path, Query, Request, State};
use axum::http::header::{AUTHORIZATION, CONTENT_TYPE};
use axum::http::request::Parts;
use axum::http::{HeaderValue, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use log::error;
use mrc_audit::ingest::{Dataset, GoldEntry};
use mrc_audit::schema::{
    check_version, record_to_line, taxonomy, validate, AnnotationRecord, LabelId, ValidationResult, RULES,
    SCHEMA_VERSION,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;
use tokio::sync::Mutex;

use crate::config::TokenTable;
use crate::second_pass::{select, SubsetMode};
use crate::store::{Store, StoreError, TaskState, TaskStatus, View};

/// Carried on every response; a request may send it to declare the record
/// version its bodies use.
pub const VERSION_HEADER: &str = "x-schema-version";
pub const NDJSON: &str = "application/x-ndjson";

#[derive(Debug, Error)]
pub enum AppError {
    #[error("entry `{0}` appears twice in the sample")]
    DuplicateEntry(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// Shared service state. Entries are read-only after construction.
pub struct App {
    entries: BTreeMap<String, GoldEntry>,
    tokens: TokenTable,
    store: Mutex<Store>,
}

impl App {
    pub fn new(entries: Vec<GoldEntry>, tokens: TokenTable, store: Store) -> Result<Self, AppError> {
        let mut map = BTreeMap::new();
        for e in entries {
            let id = e.id.clone();
            if map.insert(id.clone(), e).is_some() {
                return Err(AppError::DuplicateEntry(id));
            }
        }
        Ok(App { entries: map, tokens, store: Mutex::new(store) })
    }

    pub fn entries(&self) -> impl Iterator<Item = &GoldEntry> {
        self.entries.values()
    }

    /// Runs `f` against the store under the writer lock.
    pub async fn with_store<T>(&self, f: impl FnOnce(&mut Store) -> T) -> T {
        f(&mut *self.store.lock().await)
    }
}

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("missing or unknown bearer token")]
    Unauthorized,
    #[error("{0}")]
    Forbidden(String),
    #[error("unknown entry `{0}`")]
    NotFound(String),
    #[error("{0}")]
    BadRequest(String),
    #[error("record fails validation")]
    Rejected(ValidationResult),
    #[error("{0}")]
    Internal(String),
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        error!("{e}");
        ApiError::Internal(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self {
            ApiError::Unauthorized => StatusCode::UNAUTHORIZED,
            ApiError::Forbidden(_) => StatusCode::FORBIDDEN,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::BadRequest(_) => StatusCode::BAD_REQUEST,
            ApiError::Rejected(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let body = match &self {
            ApiError::Rejected(v) => json!({ "error": self.to_string(), "validation": v }),
            _ => json!({ "error": self.to_string() }),
        };
        let mut resp = (status, Json(body)).into_response();
        if status == StatusCode::UNAUTHORIZED {
            resp.headers_mut().insert("www-authenticate", HeaderValue::from_static("Bearer"));
        }
        resp
    }
}

/// The authenticated annotator.
pub struct Annotator(pub String);

impl FromRequestParts<Arc<App>> for Annotator {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, app: &Arc<App>) -> Result<Self, Self::Rejection> {
        let token = parts
            .headers
            .get(AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .ok_or(ApiError::Unauthorized)?;
        app.tokens.annotator(token.trim()).map(|a| Annotator(a.to_string())).ok_or(ApiError::Unauthorized)
    }
}

async fn version_header(req: Request, next: Next) -> Response {
    let declared = req.headers().get(VERSION_HEADER).map(|v| v.to_str().map(str::to_string));
    let mut resp = match declared {
        Some(Err(_)) => ApiError::BadRequest("unreadable schema version header".into()).into_response(),
        Some(Ok(v)) => match check_version(&v) {
            Ok(()) => next.run(req).await,
            Err(e) => ApiError::BadRequest(e.to_string()).into_response(),
        },
        None => next.run(req).await,
    };
    resp.headers_mut().insert(VERSION_HEADER, HeaderValue::from_static(SCHEMA_VERSION));
    resp
}

pub fn router(app: Arc<App>) -> Router {
    Router::new()
        .route("/tasks", get(list_tasks))
        .route("/tasks/{entry_id}", get(get_task))
        .route("/tasks/{entry_id}/claim", post(claim))
        .route("/tasks/{entry_id}/annotation", put(submit))
        .route("/export", get(export))
        .route("/taxonomy", get(get_taxonomy))
        .route("/progress", get(progress))
        .route("/second-pass", post(second_pass))
        .layer(middleware::from_fn(version_header))
        .with_state(app)
}

#[derive(Debug, Default, Deserialize)]
struct TaskQuery {
    dataset: Option<String>,
    status: Option<String>,
    annotator: Option<String>,
}

/// Filters for the task list; `None` matches everything.
#[derive(Debug, Clone, Default)]
pub struct TaskFilter {
    pub dataset: Option<Dataset>,
    pub status: Option<TaskStatus>,
    pub annotator: Option<String>,
}

fn parse_dataset(d: Option<String>) -> Result<Option<Dataset>, ApiError> {
    d.map(|d| d.parse::<Dataset>().map_err(|e| ApiError::BadRequest(e.to_string()))).transpose()
}

impl TryFrom<TaskQuery> for TaskFilter {
    type Error = ApiError;

    fn try_from(q: TaskQuery) -> Result<Self, ApiError> {
        let status = q.status.map(|s| s.parse::<TaskStatus>().map_err(ApiError::BadRequest)).transpose()?;
        Ok(TaskFilter { dataset: parse_dataset(q.dataset)?, status, annotator: q.annotator })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaskSummary {
    pub entry_id: String,
    pub dataset: Dataset,
    pub status: TaskStatus,
    pub annotator: Option<String>,
    pub updated_at: Option<String>,
}

/// One row per (entry, annotator) task; entries nobody has touched appear
/// once as unclaimed. Ordered by entry id, then annotator.
pub fn task_rows(entries: &BTreeMap<String, GoldEntry>, view: &View, filter: &TaskFilter) -> Vec<TaskSummary> {
    let mut out = Vec::new();
    for (id, e) in entries {
        if filter.dataset.is_some_and(|d| d != e.dataset) {
            continue;
        }
        let mut tasks: Vec<&TaskState> = view.for_entry(id).collect();
        let unclaimed;
        if tasks.is_empty() {
            unclaimed = TaskState {
                entry_id: id.clone(),
                status: TaskStatus::Unclaimed,
                annotator: None,
                record: None,
                updated_at: None,
            };
            tasks.push(&unclaimed);
        }
        for t in tasks {
            if filter.status.is_some_and(|s| s != t.status) {
                continue;
            }
            if filter.annotator.as_ref().is_some_and(|a| t.annotator.as_ref() != Some(a)) {
                continue;
            }
            out.push(TaskSummary {
                entry_id: id.clone(),
                dataset: e.dataset,
                status: t.status,
                annotator: t.annotator.clone(),
                updated_at: t.updated_at.clone(),
            });
        }
    }
    out
}

async fn list_tasks(
    State(app): State<Arc<App>>,
    _who: Annotator,
    Query(q): Query<TaskQuery>,
) -> Result<Json<Vec<TaskSummary>>, ApiError> {
    let filter = TaskFilter::try_from(q)?;
    let store = app.store.lock().await;
    Ok(Json(task_rows(&app.entries, store.view(), &filter)))
}

fn entry<'a>(app: &'a App, id: &str) -> Result<&'a GoldEntry, ApiError> {
    app.entries.get(id).ok_or_else(|| ApiError::NotFound(id.to_string()))
}

async fn get_task(
    State(app): State<Arc<App>>,
    _who: Annotator,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    let e = entry(&app, &id)?;
    let store = app.store.lock().await;
    let tasks: Vec<&TaskState> = store.view().for_entry(&id).collect();
    Ok(Json(json!({ "entry": e, "tasks": tasks })))
}

async fn claim(
    State(app): State<Arc<App>>,
    Annotator(who): Annotator,
    Path(id): Path<String>,
) -> Result<Json<Value>, ApiError> {
    entry(&app, &id)?;
    let mut store = app.store.lock().await;
    let created = store.claim(&who, &id)?;
    let task = store.view().get(&id, &who).cloned();
    Ok(Json(json!({ "claimed": created, "task": task })))
}

async fn submit(
    State(app): State<Arc<App>>,
    Annotator(who): Annotator,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let e = entry(&app, &id)?;
    let mut record: AnnotationRecord =
        serde_json::from_slice(&body).map_err(|err| ApiError::BadRequest(format!("invalid record: {err}")))?;
    if record.entry_id.is_empty() {
        record.entry_id = id.clone();
    } else if record.entry_id != id {
        return Err(ApiError::BadRequest(format!("record is for `{}`, not `{id}`", record.entry_id)));
    }
    if record.annotator_id.is_empty() {
        record.annotator_id = who.clone();
    } else if record.annotator_id != who {
        return Err(ApiError::Forbidden(format!("token belongs to `{who}`, record names `{}`", record.annotator_id)));
    }
    let result = validate(&record, e).map_err(|err| ApiError::BadRequest(err.to_string()))?;
    if !result.is_valid() {
        return Err(ApiError::Rejected(result));
    }
    let mut store = app.store.lock().await;
    let seq = store.submit(&who, record)?.seq;
    Ok(Json(json!({ "accepted": true, "seq": seq, "warnings": result.warnings })))
}

#[derive(Debug, Default, Deserialize)]
struct ExportQuery {
    what: Option<String>,
    dataset: Option<String>,
    annotator: Option<String>,
}

async fn export(
    State(app): State<Arc<App>>,
    _who: Annotator,
    Query(q): Query<ExportQuery>,
) -> Result<Response, ApiError> {
    let dataset = parse_dataset(q.dataset)?;
    let records: Vec<AnnotationRecord> = {
        let store = app.store.lock().await;
        store
            .view()
            .iter()
            .filter(|t| t.status == TaskStatus::Submitted)
            .filter(|t| q.annotator.as_ref().is_none_or(|a| t.annotator.as_ref() == Some(a)))
            .filter(|t| dataset.is_none_or(|d| app.entries.get(&t.entry_id).is_some_and(|e| e.dataset == d)))
            .filter_map(|t| t.record.clone())
            .collect()
    };
    let mut body = String::new();
    match q.what.as_deref().unwrap_or("records") {
        "records" => {
            for r in &records {
                body.push_str(&record_to_line(r));
                body.push('\n');
            }
        }
        "entries" => {
            let mut ids: Vec<&str> = records.iter().map(|r| r.entry_id.as_str()).collect();
            ids.dedup();
            for id in ids {
                body.push_str(&serde_json::to_string(&app.entries[id]).expect("entries serialize"));
                body.push('\n');
            }
        }
        other => return Err(ApiError::BadRequest(format!("unknown export `{other}`; use records or entries"))),
    }
    if body.is_empty() {
        return Ok(StatusCode::NO_CONTENT.into_response());
    }
    Ok(Response::builder()
        .status(StatusCode::OK)
        .header(CONTENT_TYPE, NDJSON)
        .body(Body::from(body))
        .expect("static response parts"))
}

fn node_json(l: LabelId) -> Value {
    let n = l.node();
    json!({
        "path": l.path_string(),
        "name": n.name,
        "display": n.display,
        "guideline": n.guideline,
        "leaf": n.children.is_empty(),
        "children": n.children.iter().map(|c| node_json(*c)).collect::<Vec<_>>(),
    })
}

async fn get_taxonomy() -> Json<Value> {
    let families: Vec<Value> = taxonomy().roots().iter().map(|r| node_json(*r)).collect();
    Json(json!({ "schema_version": SCHEMA_VERSION, "families": families, "rules": RULES }))
}

#[derive(Debug, Default, Serialize)]
struct Tally {
    entries: usize,
    in_progress: usize,
    submitted: usize,
}

async fn progress(State(app): State<Arc<App>>, _who: Annotator) -> Json<Value> {
    let store = app.store.lock().await;
    let view = store.view();
    let mut by_annotator: BTreeMap<String, Tally> = BTreeMap::new();
    let mut by_dataset: BTreeMap<String, Tally> = BTreeMap::new();
    let mut submitted_entries = 0;
    for (id, e) in &app.entries {
        let d = by_dataset.entry(e.dataset.name().to_string()).or_default();
        d.entries += 1;
        let mut any = false;
        for t in view.for_entry(id) {
            let a = by_annotator.entry(t.annotator.clone().unwrap_or_default()).or_default();
            match t.status {
                TaskStatus::Submitted => {
                    a.submitted += 1;
                    any = true;
                }
                TaskStatus::InProgress => a.in_progress += 1,
                TaskStatus::Unclaimed => {}
            }
        }
        if any {
            submitted_entries += 1;
            d.submitted += 1;
        }
    }
    Json(json!({
        "entries": app.entries.len(),
        "submitted_entries": submitted_entries,
        "by_annotator": by_annotator,
        "by_dataset": by_dataset,
    }))
}

#[derive(Debug, Deserialize)]
pub struct SecondPassRequest {
    pub from: String,
    pub to: String,
    #[serde(default = "default_fraction")]
    pub fraction: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: SubsetMode,
}

fn default_fraction() -> f64 {
    0.2
}

async fn second_pass(
    State(app): State<Arc<App>>,
    _who: Annotator,
    body: Bytes,
) -> Result<Json<Value>, ApiError> {
    let req: SecondPassRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::BadRequest(format!("invalid request: {e}")))?;
    if req.from == req.to {
        return Err(ApiError::BadRequest("second annotator must differ from the first".into()));
    }
    if !(req.fraction > 0.0 && req.fraction <= 1.0) {
        return Err(ApiError::BadRequest("fraction must be in (0, 1]".into()));
    }
    let mut store = app.store.lock().await;
    let candidates: Vec<(String, Dataset)> = app
        .entries
        .iter()
        .filter(|(id, _)| store.view().get(id, &req.from).is_some_and(|t| t.status == TaskStatus::Submitted))
        .map(|(id, e)| (id.clone(), e.dataset))
        .collect();
    let selected = select(&candidates, req.fraction, req.seed, req.mode);
    let mut claimed = 0;
    for id in &selected {
        claimed += usize::from(store.claim(&req.to, id)?);
    }
    Ok(Json(json!({ "selected": selected, "claimed": claimed, "candidates": candidates.len() })))
}

/// Serves until the listener fails. Every acknowledged write is already on
/// disk, so the process may be killed at any point.
pub async fn serve(listener: tokio::net::TcpListener, app: Arc<App>) -> std::io::Result<()> {
    axum::serve(listener, router(app)).await
}
