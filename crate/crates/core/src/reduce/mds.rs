//! Metric multidimensional scaling by SMACOF from a classical-scaling start.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use super::{minkowski, ReduceError, Result, ScoreMatrix};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MdsOptions {
    /// Minkowski exponent for the dissimilarities.
    pub p: f64,
    pub dims: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for MdsOptions {
    fn default() -> Self {
        Self { p: 2.0, dims: 2, max_iter: 500, tol: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdsResult<T> {
    pub items: Vec<String>,
    /// `items × dims`, centered at the origin.
    pub coordinates: Vec<Vec<T>>,
    pub dissimilarities: Vec<Vec<T>>,
    pub stress: T,
    /// Raw stress of the starting configuration followed by one entry per
    /// accepted iteration.
    pub stress_trace: Vec<T>,
    pub iterations: usize,
}

fn distances(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    DMatrix::from_fn(n, n, |i, j| (x.row(i) - x.row(j)).norm())
}

/// `Σ_{i<j} (d_ij − δ_ij)²`.
pub fn raw_stress<T: Scalar>(coords: &[Vec<T>], delta: &[Vec<T>]) -> T {
    let n = coords.len();
    let mut s = T::zero();
    for i in 0..n {
        for j in i + 1..n {
            let d = coords[i].iter().zip(&coords[j]).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt();
            s += (d - delta[i][j]) * (d - delta[i][j]);
        }
    }
    s
}

fn stress(x: &DMatrix<f64>, delta: &DMatrix<f64>) -> f64 {
    let d = distances(x);
    let n = x.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            s += (d[(i, j)] - delta[(i, j)]).powi(2);
        }
    }
    s
}

/// Torgerson scaling: top eigenvectors of the double-centered squared
/// dissimilarities, scaled by √eigenvalue (negative eigenvalues give zero
/// coordinates).
pub fn classical_scaling<T: Scalar>(delta: &[Vec<T>], dims: usize) -> Vec<Vec<T>> {
    let d = DMatrix::from_fn(delta.len(), delta.len(), |i, j| delta[i][j].to_f64_lossy());
    let x = classical(&d, dims);
    (0..x.nrows()).map(|i| (0..dims).map(|k| T::of(x[(i, k)])).collect()).collect()
}

fn classical(delta: &DMatrix<f64>, dims: usize) -> DMatrix<f64> {
    let n = delta.nrows();
    let sq = delta.map(|v| v * v);
    let row_means: Vec<f64> = (0..n).map(|i| sq.row(i).mean()).collect();
    let grand = sq.mean();
    let b = DMatrix::from_fn(n, n, |i, j| -0.5 * (sq[(i, j)] - row_means[i] - row_means[j] + grand));
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap_or(std::cmp::Ordering::Equal));
    let mut x = DMatrix::zeros(n, dims);
    for (k, &src) in order.iter().take(dims).enumerate() {
        let lambda = eig.eigenvalues[src].max(0.0).sqrt();
        let v = eig.eigenvectors.column(src);
        // Deterministic orientation: largest-magnitude entry positive.
        let pivot = v.iamax();
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            x[(i, k)] = sign * v[i] * lambda;
        }
    }
    x
}

fn center(x: &mut DMatrix<f64>) {
    for k in 0..x.ncols() {
        let m = x.column(k).mean();
        x.column_mut(k).add_scalar_mut(-m);
    }
}

/// Guttman transform with unit weights: `X ← B(X) X / n`.
fn guttman(x: &DMatrix<f64>, delta: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let d = distances(x);
    let mut b = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            if i != j && d[(i, j)] > 1e-300 {
                b[(i, j)] = -delta[(i, j)] / d[(i, j)];
            }
        }
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| b[(i, j)]).sum();
        b[(i, i)] = -off;
    }
    (b * x) / n as f64
}

/// Items are the matrix columns; each item's profile is its column over
/// words.
pub fn mds<T: Scalar>(matrix: &ScoreMatrix<T>, opts: &MdsOptions) -> Result<MdsResult<T>> {
    let n = matrix.cols();
    if n < 3 {
        return Err(ReduceError::TooSmall { what: "items", needed: 3, got: n });
    }
    if opts.dims == 0 {
        return Err(ReduceError::TooSmall { what: "dimensions", needed: 1, got: 0 });
    }
    let profiles: Vec<Vec<f64>> = (0..n).map(|c| matrix.column(c).iter().map(|v| v.to_f64_lossy()).collect()).collect();
    let mut delta = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i + 1..n {
            let d = minkowski(&profiles[i], &profiles[j], opts.p)?;
            delta[(i, j)] = d;
            delta[(j, i)] = d;
        }
    }
    if delta.iter().all(|&d| d == 0.0) {
        return Err(ReduceError::AllZeroDissimilarities);
    }

    let mut x = classical(&delta, opts.dims);
    center(&mut x);
    let mut current = stress(&x, &delta);
    let mut trace = vec![current];
    let mut iterations = 0;
    while iterations < opts.max_iter && current > 0.0 {
        let mut next = guttman(&x, &delta);
        center(&mut next);
        let s = stress(&next, &delta);
        if s > current {
            break;
        }
        iterations += 1;
        x = next;
        let improvement = current - s;
        current = s;
        trace.push(s);
        if improvement < opts.tol {
            break;
        }
    }

    let to_t = |m: &DMatrix<f64>| -> Vec<Vec<T>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|k| T::of(m[(i, k)])).collect()).collect()
    };
    Ok(MdsResult {
        items: matrix.col_labels().to_vec(),
        coordinates: to_t(&x),
        dissimilarities: to_t(&delta),
        stress: T::of(current),
        stress_trace: trace.into_iter().map(T::of).collect(),
        iterations,
    })
}
