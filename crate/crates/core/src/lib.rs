//! Training-load prediction from short post-exercise heart recordings.
//!
//! The crate covers the full pipeline: time-domain feature extraction from
//! RR-interval series ([`hrv`]), session records and feature encoding
//! ([`data`]), a synthetic data generator with a tunable signal level
//! ([`synth`]), seven small from-scratch classifiers ([`classify`]), and the
//! evaluation protocol — stratified splits, k-fold cross-validation,
//! one-vs-rest ROC/AUC, and a method-by-feature-set comparison grid
//! ([`eval`]). Everything is deterministic given a seed.

pub mod classify;
pub mod data;
pub mod error;
pub mod eval;
pub mod hrv;
pub mod manifest;
pub mod report;
pub mod seed;
pub mod svg;
pub mod synth;

pub use error::{Error, Result};
