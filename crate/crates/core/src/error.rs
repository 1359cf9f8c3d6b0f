use alloc::boxed::Box;
use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("split fractions must each lie in [0, 1] and sum to 1 (got sum {sum})")]
    InvalidFractions { sum: f64 },
    #[error("{name} must lie in [0, 1] (got {value})")]
    InvalidFraction { name: &'static str, value: f64 },
    #[error("stratified split requested but the corpus has no HIGH example")]
    NoHighExamples,
    #[error("unknown {scale} severity label `{value}`")]
    InvalidSeverity { value: String, scale: &'static str },

    #[error("duplicate dictionary key `{0}`")]
    DuplicateKey(String),
    #[error("dictionary entry `{0}` has an empty expansion")]
    EmptyExpansion(String),
    #[error("dictionary entry `{0}` is not lowercase")]
    NotLowercase(String),
    #[error("malformed dictionary line {line}")]
    MalformedDictionaryLine { line: usize },

    #[error("no documents to fit")]
    EmptyDocuments,
    #[error("vocabulary is empty after pruning with min_df = {min_df}")]
    EmptyVocabulary { min_df: usize },

    #[error("training set contains a single class")]
    SingleClass,
    #[error("non-finite value in input {index}")]
    NonFinite { index: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("solver did not converge within {passes} passes")]
    NotConverged { passes: usize },
    #[error("every grid point failed to train; last error: {last}")]
    AllGridPointsFailed { last: Box<Error> },

    #[error("duplicate report id `{0}`")]
    DuplicateId(String),
    #[error("empty batch")]
    EmptyBatch,
    #[error("no training results to select from")]
    NoResults,
    #[error("{stage} stage failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("no scores given")]
    EmptyScores,
    #[error("index {index} out of range for {len} items")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("no pairable rater values")]
    NoPairableValues,
}

impl Error {
    /// True for numeric or convergence failures, as opposed to bad input data.
    pub fn is_numeric(&self) -> bool {
        match self {
            Error::NotConverged { .. } | Error::NonFinite { .. } => true,
            Error::AllGridPointsFailed { last } => last.is_numeric(),
            Error::Stage { source, .. } => source.is_numeric(),
            _ => false,
        }
    }
}
