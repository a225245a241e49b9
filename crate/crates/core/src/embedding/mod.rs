//! In-memory word2vec models with exact cosine-similarity queries.
//!
//! Vectors are kept twice: the raw values as read from disk (so a model can
//! be written back bit-exactly and used as classifier features) and a unit
//! normalized copy used for every similarity computation. Similarity is the
//! dot product of the two unit vectors accumulated in index order, so
//! `cosine(a, b) == cosine(b, a)` holds exactly.

mod word2vec;

use std::cmp::Ordering;
use std::collections::{HashMap, HashSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use word2vec::{read_binary, read_text, write_binary, write_text};

/// Vectors whose Euclidean norm falls below this are unusable for similarity.
pub const MIN_USABLE_NORM: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("truncated payload in record {record} ({token:?}): {reason}")]
    Truncated {
        record: usize,
        token: String,
        reason: String,
    },
    #[error("malformed line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("non-finite value in vector of {0:?}")]
    NonFinite(String),
    #[error("vocabulary is empty after filtering")]
    EmptyVocabulary,
    #[error("vector dimension must be positive")]
    ZeroDimension,
    #[error("expected {expected} vector values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("token {0:?} is not in the vocabulary")]
    OutOfVocabulary(String),
    #[error("token {0:?} has a zero-norm vector")]
    Unusable(String),
}

pub type Result<T, E = EmbeddingError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelFormat {
    Binary,
    Text,
}

impl std::str::FromStr for ModelFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "binary" | "bin" => Ok(ModelFormat::Binary),
            "text" | "txt" => Ok(ModelFormat::Text),
            other => Err(format!("unknown model format {other:?} (expected binary or text)")),
        }
    }
}

/// One ranked neighbor of a query token.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeighborResult {
    pub query: String,
    pub neighbor: String,
    pub similarity: f32,
}

/// Immutable vocabulary plus vector matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    name: String,
    dim: usize,
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    // lowercase key -> token indices in file order
    folded: HashMap<String, Vec<usize>>,
    vectors: Vec<f32>,
    unit: Vec<f32>,
    norms: Vec<f32>,
    usable: Vec<bool>,
}

impl EmbeddingModel {
    /// Builds a model from tokens and a row-major `tokens.len() × dim` matrix.
    ///
    /// Duplicate tokens keep their first occurrence; later ones are dropped
    /// with a warning.
    pub fn from_rows(
        name: impl Into<String>,
        dim: usize,
        tokens: Vec<String>,
        vectors: Vec<f32>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(EmbeddingError::ZeroDimension);
        }
        if vectors.len() != tokens.len() * dim {
            return Err(EmbeddingError::ShapeMismatch {
                expected: tokens.len() * dim,
                actual: vectors.len(),
            });
        }
        let mut builder = ModelBuilder::new(name.into(), dim, tokens.len());
        for (token, row) in tokens.into_iter().zip(vectors.chunks_exact(dim)) {
            builder.push(token, row)?;
        }
        builder.finish()
    }

    /// Loads a model from disk. The model name defaults to the file stem.
    pub fn load(
        path: impl AsRef<Path>,
        format: ModelFormat,
        vocab_filter: Option<&HashSet<String>>,
    ) -> Result<Self> {
        let path = path.as_ref();
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "model".to_string());
        let file = std::fs::File::open(path)?;
        let mut reader = std::io::BufReader::with_capacity(1 << 20, file);
        match format {
            ModelFormat::Binary => read_binary(&mut reader, name, vocab_filter),
            ModelFormat::Text => read_text(&mut reader, name, vocab_filter),
        }
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vocab.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vocab.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.vocab
    }

    pub fn token(&self, idx: usize) -> &str {
        &self.vocab[idx]
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn contains(&self, token: &str) -> bool {
        self.index.contains_key(token)
    }

    /// Raw stored vector.
    pub fn vector(&self, idx: usize) -> &[f32] {
        &self.vectors[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn unit_vector(&self, idx: usize) -> &[f32] {
        &self.unit[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn norm(&self, idx: usize) -> f32 {
        self.norms[idx]
    }

    pub fn is_usable(&self, idx: usize) -> bool {
        self.usable[idx]
    }

    /// Indices of every token whose lowercase form equals `token.to_lowercase()`,
    /// in file order.
    pub fn case_variants(&self, token: &str) -> &[usize] {
        self.folded
            .get(&token.to_lowercase())
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Resolves a token to a usable vector index, falling back to the first
    /// usable case variant when `fold_case` is set.
    pub fn resolve(&self, token: &str, fold_case: bool) -> Result<usize> {
        match self.index.get(token) {
            Some(&idx) if self.usable[idx] => Ok(idx),
            Some(_) if !fold_case => Err(EmbeddingError::Unusable(token.to_string())),
            _ if fold_case => {
                let variants = self.case_variants(token);
                if let Some(&idx) = variants.iter().find(|&&i| self.usable[i]) {
                    Ok(idx)
                } else if variants.is_empty() {
                    Err(EmbeddingError::OutOfVocabulary(token.to_string()))
                } else {
                    Err(EmbeddingError::Unusable(token.to_string()))
                }
            }
            _ => Err(EmbeddingError::OutOfVocabulary(token.to_string())),
        }
    }

    /// Cosine similarity between two indices: dot of unit vectors in index order.
    pub fn cosine_idx(&self, a: usize, b: usize) -> f32 {
        let (u, v) = (self.unit_vector(a), self.unit_vector(b));
        let mut acc = 0.0f32;
        for i in 0..self.dim {
            acc += u[i] * v[i];
        }
        acc
    }

    /// Exact cosine between two tokens (no case folding).
    pub fn cosine(&self, w1: &str, w2: &str) -> Result<f32> {
        let a = self.resolve(w1, false)?;
        let b = self.resolve(w2, false)?;
        Ok(self.cosine_idx(a, b))
    }

    fn rank_cmp(&self, a: &(f32, usize), b: &(f32, usize)) -> Ordering {
        b.0.total_cmp(&a.0)
            .then_with(|| self.vocab[a.1].cmp(&self.vocab[b.1]))
    }

    /// The `k` most similar usable tokens to `query`.
    ///
    /// Ordering is similarity descending, then token ascending. The query is
    /// never returned; with `fold_case` its case variants are excluded too and
    /// results are deduplicated by lowercase key, keeping the best variant.
    pub fn top_k(&self, query: &str, k: usize, fold_case: bool) -> Result<Vec<NeighborResult>> {
        let q = self.resolve(query, fold_case)?;
        if k == 0 {
            return Ok(Vec::new());
        }
        let mut excluded: Vec<usize> = vec![q];
        if fold_case {
            excluded.extend_from_slice(self.case_variants(&self.vocab[q]));
            excluded.extend_from_slice(self.case_variants(query));
        }
        let qv = self.unit_vector(q);
        let mut scored: Vec<(f32, usize)> = (0..self.vocab.len())
            .filter(|&i| self.usable[i] && !excluded.contains(&i))
            .map(|i| {
                let v = self.unit_vector(i);
                let mut acc = 0.0f32;
                for d in 0..self.dim {
                    acc += qv[d] * v[d];
                }
                (acc, i)
            })
            .collect();

        let picked: Vec<(f32, usize)> = if fold_case {
            let mut prefix_len = k.saturating_mul(2).max(8);
            loop {
                let prefix = self.ranked_prefix(&mut scored, prefix_len);
                let mut seen = HashSet::new();
                let distinct: Vec<(f32, usize)> = prefix
                    .iter()
                    .copied()
                    .filter(|&(_, i)| seen.insert(self.vocab[i].to_lowercase()))
                    .take(k)
                    .collect();
                if distinct.len() >= k || prefix_len >= scored.len() {
                    break distinct;
                }
                prefix_len = prefix_len.saturating_mul(2);
            }
        } else {
            self.ranked_prefix(&mut scored, k)
        };

        Ok(picked
            .into_iter()
            .map(|(similarity, i)| NeighborResult {
                query: query.to_string(),
                neighbor: self.vocab[i].clone(),
                similarity,
            })
            .collect())
    }

    /// Sorted best `m` entries of `scored` (which is partially reordered).
    fn ranked_prefix(&self, scored: &mut [(f32, usize)], m: usize) -> Vec<(f32, usize)> {
        let m = m.min(scored.len());
        if m == 0 {
            return Vec::new();
        }
        if m < scored.len() {
            scored.select_nth_unstable_by(m - 1, |a, b| self.rank_cmp(a, b));
        }
        let mut prefix = scored[..m].to_vec();
        prefix.sort_by(|a, b| self.rank_cmp(a, b));
        prefix
    }

    /// Runs `top_k` for many queries in parallel; results keep query order.
    pub fn top_k_batch(
        &self,
        queries: &[String],
        k: usize,
        fold_case: bool,
    ) -> Vec<Result<Vec<NeighborResult>>> {
        queries
            .par_iter()
            .map(|q| self.top_k(q, k, fold_case))
            .collect()
    }
}

pub(crate) struct ModelBuilder {
    name: String,
    dim: usize,
    vocab: Vec<String>,
    index: HashMap<String, usize>,
    vectors: Vec<f32>,
    duplicates: usize,
}

impl ModelBuilder {
    pub(crate) fn new(name: String, dim: usize, capacity: usize) -> Self {
        // declared sizes can be huge under a vocab filter; cap the reservation
        let capacity = capacity.min(1 << 16);
        Self {
            name,
            dim,
            vocab: Vec::with_capacity(capacity),
            index: HashMap::with_capacity(capacity),
            vectors: Vec::with_capacity(capacity * dim),
            duplicates: 0,
        }
    }

    pub(crate) fn push(&mut self, token: String, row: &[f32]) -> Result<()> {
        debug_assert_eq!(row.len(), self.dim);
        if row.iter().any(|x| !x.is_finite()) {
            return Err(EmbeddingError::NonFinite(token));
        }
        if self.index.contains_key(&token) {
            self.duplicates += 1;
            return Ok(());
        }
        self.index.insert(token.clone(), self.vocab.len());
        self.vocab.push(token);
        self.vectors.extend_from_slice(row);
        Ok(())
    }

    pub(crate) fn finish(self) -> Result<EmbeddingModel> {
        if self.vocab.is_empty() {
            return Err(EmbeddingError::EmptyVocabulary);
        }
        if self.duplicates > 0 {
            log::warn!(
                "model {}: dropped {} duplicate token(s), keeping first occurrences",
                self.name,
                self.duplicates
            );
        }
        let dim = self.dim;
        let n = self.vocab.len();
        let mut unit = vec![0.0f32; n * dim];
        let mut norms = Vec::with_capacity(n);
        let mut usable = Vec::with_capacity(n);
        for (i, row) in self.vectors.chunks_exact(dim).enumerate() {
            let norm = row.iter().map(|&x| f64::from(x) * f64::from(x)).sum::<f64>().sqrt();
            norms.push(norm as f32);
            let ok = norm >= MIN_USABLE_NORM;
            usable.push(ok);
            if ok {
                for (u, &x) in unit[i * dim..(i + 1) * dim].iter_mut().zip(row) {
                    *u = (f64::from(x) / norm) as f32;
                }
            }
        }
        let mut folded: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, t) in self.vocab.iter().enumerate() {
            folded.entry(t.to_lowercase()).or_default().push(i);
        }
        Ok(EmbeddingModel {
            name: self.name,
            dim,
            vocab: self.vocab,
            index: self.index,
            folded,
            vectors: self.vectors,
            unit,
            norms,
            usable,
        })
    }
}

pub(crate) fn keep_token(filter: Option<&HashSet<String>>, token: &str) -> bool {
    match filter {
        None => true,
        Some(set) => set.contains(token) || set.contains(&token.to_lowercase()),
    }
}
