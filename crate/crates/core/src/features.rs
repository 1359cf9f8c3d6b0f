//! TF-IDF featurization with stop-word removal and document-frequency pruning.
//!
//! Weighting: raw term counts times smoothed IDF,
//! `idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1`, followed by L2
//! normalization. Vocabulary indices are assigned in lexicographic order.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::textprep::TokenSequence;

/// Default minimum document frequency.
pub const DEFAULT_MIN_DF: usize = 10;

const ENGLISH_STOP_WORDS: &str = include_str!("../data/stop_words.txt");

/// The bundled 318-term English stop-word list.
pub fn english_stop_words() -> BTreeSet<String> {
    ENGLISH_STOP_WORDS
        .lines()
        .map(str::trim)
        .filter(|w| !w.is_empty())
        .map(ToString::to_string)
        .collect()
}

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SparseVector {
    dim: usize,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl SparseVector {
    pub fn zeros(dim: usize) -> SparseVector {
        SparseVector {
            dim,
            indices: Vec::new(),
            values: Vec::new(),
        }
    }

    /// Builds from `(index, value)` pairs. Indices must be unique and below
    /// `dim`; explicit zeros are dropped.
    pub fn from_pairs(dim: usize, mut pairs: Vec<(usize, f64)>) -> Result<SparseVector> {
        pairs.sort_by_key(|&(i, _)| i);
        let mut v = SparseVector::zeros(dim);
        for (i, x) in pairs {
            if i >= dim {
                return Err(Error::IndexOutOfRange { index: i, len: dim });
            }
            if v.indices.last() == Some(&i) {
                return Err(Error::InvalidConfig("duplicate sparse index"));
            }
            if !x.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if x != 0.0 {
                v.indices.push(i);
                v.values.push(x);
            }
        }
        Ok(v)
    }

    pub fn from_dense(values: &[f64]) -> SparseVector {
        let mut v = SparseVector::zeros(values.len());
        for (i, &x) in values.iter().enumerate() {
            if x != 0.0 {
                v.indices.push(i);
                v.values.push(x);
            }
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn get(&self, index: usize) -> f64 {
        match self.indices.binary_search(&index) {
            Ok(pos) => self.values[pos],
            Err(_) => 0.0,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.dim];
        for (i, x) in self.iter() {
            out[i] = x;
        }
        out
    }

    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (mut a, mut b, mut sum) = (0, 0, 0.0);
        while a < self.indices.len() && b < other.indices.len() {
            match self.indices[a].cmp(&other.indices[b]) {
                core::cmp::Ordering::Less => a += 1,
                core::cmp::Ordering::Greater => b += 1,
                core::cmp::Ordering::Equal => {
                    sum += self.values[a] * other.values[b];
                    a += 1;
                    b += 1;
                }
            }
        }
        sum
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sq())
    }

    pub fn scaled(&self, factor: f64) -> SparseVector {
        SparseVector {
            dim: self.dim,
            indices: self.indices.clone(),
            values: self.values.iter().map(|x| x * factor).collect(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: BTreeMap<String, usize>,
    document_frequency: Vec<usize>,
    n_docs_fit: usize,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn term(&self, index: usize) -> &str {
        &self.terms[index]
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn document_frequency(&self, index: usize) -> usize {
        self.document_frequency[index]
    }

    pub fn n_docs_fit(&self) -> usize {
        self.n_docs_fit
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TfidfModel {
    vocabulary: Vocabulary,
    idf: Vec<f64>,
    min_df: usize,
    stop_words: BTreeSet<String>,
}

pub fn smoothed_idf(n_docs: usize, df: usize) -> f64 {
    libm::log((1.0 + n_docs as f64) / (1.0 + df as f64)) + 1.0
}

/// Fits the vocabulary and IDF weights. Terms must appear in at least
/// `min_df` documents and not be stop words.
pub fn fit_tfidf(docs: &[TokenSequence], min_df: usize, stop_words: &BTreeSet<String>) -> Result<TfidfModel> {
    if docs.is_empty() {
        return Err(Error::EmptyDocuments);
    }
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let unique: BTreeSet<&str> = doc.iter().collect();
        for term in unique {
            *df.entry(term).or_insert(0) += 1;
        }
    }
    let n_docs = docs.len();
    let mut terms = Vec::new();
    let mut dfs = Vec::new();
    let mut idf = Vec::new();
    // BTreeMap iteration is lexicographic, which fixes the index order
    for (term, count) in df {
        if count >= min_df && !stop_words.contains(term) {
            terms.push(term.to_string());
            dfs.push(count);
            idf.push(smoothed_idf(n_docs, count));
        }
    }
    if terms.is_empty() {
        return Err(Error::EmptyVocabulary { min_df });
    }
    let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    Ok(TfidfModel {
        vocabulary: Vocabulary {
            terms,
            index,
            document_frequency: dfs,
            n_docs_fit: n_docs,
        },
        idf,
        min_df,
        stop_words: stop_words.clone(),
    })
}

impl TfidfModel {
    /// Rebuilds a fitted model from persisted `(term, df, idf)` rows. Rows
    /// must be in strictly increasing lexicographic order.
    pub fn from_parts(min_df: usize, n_docs_fit: usize, rows: Vec<(String, usize, f64)>) -> Result<TfidfModel> {
        if rows.is_empty() {
            return Err(Error::EmptyVocabulary { min_df });
        }
        let mut terms = Vec::with_capacity(rows.len());
        let mut dfs = Vec::with_capacity(rows.len());
        let mut idf = Vec::with_capacity(rows.len());
        for (i, (term, df, weight)) in rows.into_iter().enumerate() {
            if terms.last().is_some_and(|prev: &String| *prev >= term) {
                return Err(Error::InvalidConfig("vocabulary terms must be sorted and unique"));
            }
            if !weight.is_finite() || weight <= 0.0 {
                return Err(Error::NonFinite { index: i });
            }
            terms.push(term);
            dfs.push(df);
            idf.push(weight);
        }
        let index = terms.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
        Ok(TfidfModel {
            vocabulary: Vocabulary {
                terms,
                index,
                document_frequency: dfs,
                n_docs_fit,
            },
            idf,
            min_df,
            stop_words: BTreeSet::new(),
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocabulary
    }

    pub fn dim(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn min_df(&self) -> usize {
        self.min_df
    }

    pub fn stop_words(&self) -> &BTreeSet<String> {
        &self.stop_words
    }

    /// `(term, df, idf)` rows in index order.
    pub fn rows(&self) -> impl Iterator<Item = (&str, usize, f64)> {
        (0..self.dim()).map(|i| {
            (
                self.vocabulary.term(i),
                self.vocabulary.document_frequency(i),
                self.idf[i],
            )
        })
    }

    pub fn transform(&self, doc: &TokenSequence) -> SparseVector {
        transform_tfidf(self, doc)
    }
}

/// Counts times IDF for in-vocabulary terms, L2-normalized. A document with
/// no in-vocabulary term maps to the zero vector.
pub fn transform_tfidf(model: &TfidfModel, doc: &TokenSequence) -> SparseVector {
    let mut counts: BTreeMap<usize, f64> = BTreeMap::new();
    for term in doc.iter() {
        if let Some(i) = model.vocabulary.index_of(term) {
            *counts.entry(i).or_insert(0.0) += 1.0;
        }
    }
    let mut v = SparseVector::zeros(model.dim());
    for (i, count) in counts {
        v.indices.push(i);
        v.values.push(count * model.idf[i]);
    }
    let norm = v.norm();
    if norm > 0.0 {
        for x in &mut v.values {
            *x /= norm;
        }
    }
    v
}
