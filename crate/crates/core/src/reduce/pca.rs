//! Principal component analysis with collections as variables and words as
//! observations.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{ReduceError, Result, ScoreMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcaOptions {
    pub n_components: usize,
    /// Scale each column to unit variance (correlation PCA).
    pub standardize: bool,
}

impl Default for PcaOptions {
    fn default() -> Self {
        Self { n_components: 7, standardize: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaResult<T> {
    pub words: Vec<String>,
    /// Columns that entered the analysis (zero-variance ones are dropped
    /// when standardizing).
    pub collections: Vec<String>,
    pub dropped: Vec<String>,
    /// `collections × n_components`, orthonormal columns, row-major.
    pub components: Vec<Vec<T>>,
    /// `words × n_components`: the word's projection on each component
    /// divided by √(n−1).
    pub loadings: Vec<Vec<T>>,
    /// `collections × n_components`: component direction times
    /// √eigenvalue, i.e. the variable/component correlation when
    /// standardized.
    pub variable_loadings: Vec<Vec<T>>,
    pub explained_variance: Vec<T>,
    pub explained_variance_ratio: Vec<T>,
    pub mean: Vec<T>,
    pub scale: Vec<T>,
}

impl<T: Scalar> PcaResult<T> {
    pub fn n_components(&self) -> usize {
        self.explained_variance.len()
    }

    /// Words sorted by |loading| on `component`, largest first, ties by word.
    pub fn top_words(&self, component: usize, m: usize) -> Vec<(&str, T)> {
        let mut rows: Vec<(&str, T)> =
            self.words.iter().zip(&self.loadings).map(|(w, l)| (w.as_str(), l[component])).collect();
        rows.sort_by(|a, b| {
            b.1.abs().partial_cmp(&a.1.abs()).unwrap_or(std::cmp::Ordering::Equal).then(a.0.cmp(b.0))
        });
        rows.truncate(m);
        rows
    }

    /// Centered (and scaled) input rebuilt from the retained components.
    pub fn reconstruct(&self) -> Vec<Vec<T>> {
        let root = T::of_usize(self.words.len() - 1).sqrt();
        self.loadings
            .iter()
            .map(|l| {
                (0..self.collections.len())
                    .map(|c| (0..self.n_components()).map(|j| l[j] * root * self.components[c][j]).sum())
                    .collect()
            })
            .collect()
    }
}

pub fn pca<T: Scalar>(matrix: &ScoreMatrix<T>, opts: &PcaOptions) -> Result<PcaResult<T>> {
    let n = matrix.rows();
    if n < 2 {
        return Err(ReduceError::TooSmall { what: "rows", needed: 2, got: n });
    }
    let nf = (n - 1) as f64;
    let mut keep = Vec::new();
    let mut dropped = Vec::new();
    let mut mean = Vec::new();
    let mut scale = Vec::new();
    for c in 0..matrix.cols() {
        let col: Vec<f64> = matrix.column(c).iter().map(|v| v.to_f64_lossy()).collect();
        let mu = col.iter().sum::<f64>() / n as f64;
        let sd = (col.iter().map(|v| (v - mu) * (v - mu)).sum::<f64>() / nf).sqrt();
        if opts.standardize && sd <= 1e-12 {
            log::warn!("column {:?} has zero variance; dropped", matrix.col_labels()[c]);
            dropped.push(matrix.col_labels()[c].clone());
            continue;
        }
        keep.push(c);
        mean.push(mu);
        scale.push(if opts.standardize { sd } else { 1.0 });
    }
    if keep.is_empty() {
        return Err(ReduceError::NoVariance);
    }
    let m = keep.len();
    let max = n.min(m);
    if opts.n_components == 0 || opts.n_components > max {
        return Err(ReduceError::TooManyComponents { requested: opts.n_components, max });
    }
    let z = DMatrix::from_fn(n, m, |r, j| (matrix.get(r, keep[j]).to_f64_lossy() - mean[j]) / scale[j]);
    let cov = (z.transpose() * &z) / nf;
    let eig = SymmetricEigen::new(cov);
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(std::cmp::Ordering::Equal));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();
    let total: f64 = values.iter().sum();
    let k = opts.n_components;

    let mut components = vec![vec![T::zero(); k]; m];
    let mut loadings = vec![vec![T::zero(); k]; n];
    let mut variable_loadings = vec![vec![T::zero(); k]; m];
    for (j, &src) in order.iter().take(k).enumerate() {
        let v = eig.eigenvectors.column(src);
        let scores: Vec<f64> = (0..n).map(|r| z.row(r).dot(&v.transpose()) / nf.sqrt()).collect();
        let mut pivot = 0;
        for (r, s) in scores.iter().enumerate() {
            if s.abs() > scores[pivot].abs() {
                pivot = r;
            }
        }
        let sign = if scores[pivot] < 0.0 { -1.0 } else { 1.0 };
        for c in 0..m {
            components[c][j] = T::of(sign * v[c]);
            variable_loadings[c][j] = T::of(sign * v[c] * values[j].sqrt());
        }
        for r in 0..n {
            loadings[r][j] = T::of(sign * scores[r]);
        }
    }
    let ratio = |x: f64| if total > 0.0 { x / total } else { 0.0 };
    Ok(PcaResult {
        words: matrix.row_labels().to_vec(),
        collections: keep.iter().map(|&c| matrix.col_labels()[c].clone()).collect(),
        dropped,
        components,
        loadings,
        variable_loadings,
        explained_variance: values[..k].iter().map(|&x| T::of(x)).collect(),
        explained_variance_ratio: values[..k].iter().map(|&x| T::of(ratio(x))).collect(),
        mean: mean.into_iter().map(T::of).collect(),
        scale: scale.into_iter().map(T::of).collect(),
    })
}
