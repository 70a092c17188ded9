//! Toolkit for auditing machine-reading-comprehension gold standards.
//!
//! - [`ingest`] reads the six supported dataset formats and draws samples.
//! - [`schema`] holds the annotation taxonomy, records and validation.
//! - [`textlex`] tokenizes, splits sentences and computes lexical-overlap
//!   features.
//! - [`cuebaseline`] fits a logistic-regression supporting-fact predictor on
//!   those features and evaluates it leave-one-out.
//! - [`scoring`] has answer metrics, inter-annotator agreement and the
//!   per-dataset label reports.

pub mod cuebaseline;
pub mod ingest;
pub mod schema;
pub mod scoring;
pub mod textlex;
