//! Lexical-cue baseline: logistic regression over the five overlap
//! features, predicting which context sentences are supporting facts.
//!
//! A high score means the supporting facts of a dataset can be located from
//! surface overlap with the question alone.

mod loo;
mod model;
pub mod synthetic;

pub use loo::{
    design, entry_features, fold_seed, half_width, instances, loo_by_dataset, loo_designs, loo_evaluate,
    AnnotatedEntry, EntryDesign, EvalConfig, EvalError, EvalScores, PrfScore,
};
pub use model::{
    fit, fit_matrix, fit_traced, sigmoid, ClassWeight, CueModel, FitConfig, FitError, LabeledInstance, Objective,
    Params, Prediction, Standardizer, DIM,
};
