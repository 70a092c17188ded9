//! Annotation workbench: a durable event log of claims and submissions and
//! the HTTP service annotators talk to.

pub mod config;
pub mod second_pass;
pub mod service;
pub mod store;

pub use config::{ConfigError, TokenTable, TOKENS_ENV};
pub use second_pass::{select, subset_size, SubsetMode};
pub use service::{router, serve, task_rows, App, AppError, TaskFilter, TaskSummary, NDJSON, VERSION_HEADER};
pub use store::{read_log, Action, Event, Store, StoreError, TaskState, TaskStatus, View};
