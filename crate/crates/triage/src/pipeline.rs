//! Shared glue between corpus files, preprocessing, features and models.

use triage_core::corpus::{LabeledReport, Report, Severity};
use triage_core::embed::EmbeddingMatrix;
use triage_core::features::{english_stop_words, fit_tfidf, SparseVector, TfidfModel};
use triage_core::head::{HeadModel, Sample};
use triage_core::svm::SvmModel;
use triage_core::textprep::{AcronymDictionary, Preprocessor, TokenSequence};

use crate::error::{Context, Error, Result};

/// Everything needed to score raw report text with an SVM.
#[derive(Debug, Clone, PartialEq)]
pub struct SvmPipeline {
    pub preprocessor: Preprocessor,
    pub tfidf: TfidfModel,
    pub svm: SvmModel,
}

impl SvmPipeline {
    pub fn score(&self, report: &Report) -> Result<f64> {
        let x = self.tfidf.transform(&self.preprocessor.apply(report));
        self.svm.decision_score(&x).context(format!("scoring report {}", report.id))
    }
}

/// A persisted head plus its metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadArtifact {
    pub model: HeadModel,
    pub provenance: String,
    pub seed: u64,
}

impl HeadArtifact {
    /// Decision score is the logit; flagging at zero is `p > 0.5`.
    pub fn score(&self, id: &str, embeddings: &EmbeddingMatrix) -> Result<f64> {
        let x = lookup(embeddings, id)?;
        self.model.logit(x).context(format!("scoring report {id}"))
    }
}

pub fn lookup<'a>(embeddings: &'a EmbeddingMatrix, id: &str) -> Result<&'a [f64]> {
    embeddings
        .get(id)
        .ok_or_else(|| Error::Usage(format!("report {id} has no row in the embedding file")))
}

pub fn tokens(pre: &Preprocessor, reports: &[LabeledReport]) -> Vec<TokenSequence> {
    reports.iter().map(|r| pre.apply(&r.report)).collect()
}

pub fn fit_features(pre: &Preprocessor, train: &[LabeledReport], min_df: usize) -> Result<TfidfModel> {
    fit_tfidf(&tokens(pre, train), min_df, &english_stop_words()).context("fitting TF-IDF")
}

pub fn featurize(pre: &Preprocessor, model: &TfidfModel, reports: &[LabeledReport]) -> Vec<(SparseVector, Severity)> {
    reports
        .iter()
        .map(|r| (model.transform(&pre.apply(&r.report)), r.severity()))
        .collect()
}

pub fn samples(embeddings: &EmbeddingMatrix, reports: &[LabeledReport]) -> Result<Vec<Sample>> {
    reports
        .iter()
        .map(|r| Ok((lookup(embeddings, r.id())?.to_vec(), r.severity())))
        .collect()
}

pub fn default_preprocessor() -> Preprocessor {
    Preprocessor::new(AcronymDictionary::default_glossary(), triage_core::textprep::DEFAULT_TOKEN_CAP)
        .expect("default cap is positive")
}
