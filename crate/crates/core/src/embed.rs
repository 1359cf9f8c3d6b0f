//! Fixed-size report embeddings and the random-projection fallback encoder.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::features::{SparseVector, TfidfModel};
use crate::textprep::TokenSequence;

/// Embedding rows keyed by report id, in insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    dim: usize,
    ids: Vec<String>,
    rows: Vec<Vec<f64>>,
    index: BTreeMap<String, usize>,
    pub provenance: String,
}

impl EmbeddingMatrix {
    pub fn new(dim: usize, provenance: impl Into<String>) -> Result<EmbeddingMatrix> {
        if dim == 0 {
            return Err(Error::InvalidConfig("embedding dim must be at least 1"));
        }
        Ok(EmbeddingMatrix {
            dim,
            ids: Vec::new(),
            rows: Vec::new(),
            index: BTreeMap::new(),
            provenance: provenance.into(),
        })
    }

    pub fn push(&mut self, id: impl Into<String>, row: Vec<f64>) -> Result<()> {
        let id = id.into();
        if row.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: row.len() });
        }
        if let Some(index) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if self.index.contains_key(&id) {
            return Err(Error::DuplicateId(id));
        }
        self.index.insert(id.clone(), self.rows.len());
        self.ids.push(id);
        self.rows.push(row);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.index.get(id).map(|&i| self.rows[i].as_slice())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.ids.iter().map(String::as_str).zip(self.rows.iter().map(Vec::as_slice))
    }
}

/// Dense `dim x V` projection with entries `+-1/sqrt(dim)`, equiprobable.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomProjection {
    input_dim: usize,
    output_dim: usize,
    /// Column-major: the `output_dim` entries for input feature `t` are
    /// contiguous.
    columns: Vec<f64>,
}

impl RandomProjection {
    pub fn new(input_dim: usize, output_dim: usize, seed: u64) -> Result<RandomProjection> {
        if output_dim == 0 {
            return Err(Error::InvalidConfig("embedding dim must be at least 1"));
        }
        let scale = 1.0 / libm::sqrt(output_dim as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let columns = (0..input_dim * output_dim)
            .map(|_| if rng.random::<bool>() { scale } else { -scale })
            .collect();
        Ok(RandomProjection { input_dim, output_dim, columns })
    }

    pub fn project(&self, x: &SparseVector) -> Result<Vec<f64>> {
        if x.dim() != self.input_dim {
            return Err(Error::DimensionMismatch { expected: self.input_dim, found: x.dim() });
        }
        let mut out = vec![0.0; self.output_dim];
        for (t, value) in x.iter() {
            let column = &self.columns[t * self.output_dim..(t + 1) * self.output_dim];
            for (o, r) in out.iter_mut().zip(column) {
                *o += r * value;
            }
        }
        Ok(out)
    }
}

/// Embeds each document as `R * tfidf(doc)`. Row ids are the documents'
/// `source_id`s.
pub fn project_fallback_embeddings(
    model: &TfidfModel,
    docs: &[TokenSequence],
    dim: usize,
    seed: u64,
) -> Result<EmbeddingMatrix> {
    let projection = RandomProjection::new(model.dim(), dim, seed)?;
    let mut out = EmbeddingMatrix::new(dim, "fallback")?;
    for doc in docs {
        let row = projection.project(&model.transform(doc))?;
        out.push(doc.source_id.to_string(), row)?;
    }
    Ok(out)
}
