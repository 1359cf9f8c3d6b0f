//! Severity triage for free-text incident-learning reports.
//!
//! The crate is `no_std` (with `alloc`) and holds the pure algorithmic core:
//!
//! - [`corpus`]: report data model, severity binarization, seeded splits,
//!   corpus statistics and a synthetic two-institution generator.
//! - [`textprep`]: acronym expansion, lower-casing, tokenization, truncation.
//! - [`features`]: TF-IDF fitting and sparse L2-normalized feature vectors.
//! - [`svm`]: soft-margin SVM trained by SMO, plus C-grid tuning.
//! - [`embed`]: embedding matrices and a seeded random-projection fallback.
//! - [`head`]: sigmoid classification head, weighted BCE, Adam, restarts and
//!   sequential transfer training.
//! - [`eval`]: ROC/AUROC, alert-rate operating points, confusion metrics,
//!   F1 variants, Krippendorff's alpha and pooled rater AUROC.
//!
//! File formats, ingestion and the command-line tool live in the `triage`
//! crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod corpus;
pub mod embed;
pub mod error;
pub mod eval;
pub mod features;
pub mod head;
pub mod svm;
pub mod textprep;

pub use error::{Error, Result};
