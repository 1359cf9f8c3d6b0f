//! Std companion to `triage-core`: corpus ingest, model and embedding
//! files, the `triage` command line and the synthetic transfer experiment.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod ingest;
pub mod pipeline;
pub mod repro;

pub use error::{Error, Result};
pub use triage_core as core;
