//! PCA over the word × collection score matrix and metric MDS of the
//! collections.

mod mds;
mod pca;

use std::collections::HashSet;
use std::io::{BufRead, Write};

use thiserror::Error;

use crate::scalar::Scalar;

pub use mds::{classical_scaling, mds, raw_stress, MdsOptions, MdsResult};
pub use pca::{pca, PcaOptions, PcaResult};

#[derive(Debug, Error)]
pub enum ReduceError {
    #[error("matrix has {values} values, expected {rows}×{cols}")]
    Shape { rows: usize, cols: usize, values: usize },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("need at least {needed} {what}, got {got}")]
    TooSmall { what: &'static str, needed: usize, got: usize },
    #[error("{requested} components requested but at most {max} are available")]
    TooManyComponents { requested: usize, max: usize },
    #[error("every column has zero variance")]
    NoVariance,
    #[error("vectors have lengths {0} and {1}")]
    LengthMismatch(usize, usize),
    #[error("Minkowski exponent must be at least 1, got {0}")]
    BadExponent(f64),
    #[error("all dissimilarities are zero")]
    AllZeroDissimilarities,
    #[error("score matrix line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ReduceError> = std::result::Result<T, E>;

/// Words × collections, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix<T> {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    values: Vec<T>,
}

fn check_unique(labels: &[String]) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(ReduceError::DuplicateLabel(l.clone()));
        }
    }
    Ok(())
}

impl<T: Scalar> ScoreMatrix<T> {
    pub fn new(row_labels: Vec<String>, col_labels: Vec<String>, values: Vec<T>) -> Result<Self> {
        let (rows, cols) = (row_labels.len(), col_labels.len());
        if values.len() != rows * cols {
            return Err(ReduceError::Shape { rows, cols, values: values.len() });
        }
        check_unique(&row_labels)?;
        check_unique(&col_labels)?;
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(ReduceError::NonFinite { row: i / cols, col: i % cols });
        }
        Ok(Self { row_labels, col_labels, values })
    }

    pub fn from_rows(row_labels: Vec<String>, col_labels: Vec<String>, rows: &[Vec<T>]) -> Result<Self> {
        let cols = col_labels.len();
        if let Some(r) = rows.iter().find(|r| r.len() != cols) {
            return Err(ReduceError::LengthMismatch(r.len(), cols));
        }
        Self::new(row_labels, col_labels, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn get(&self, row: usize, col: usize) -> T {
        self.values[row * self.cols() + col]
    }

    pub fn row(&self, row: usize) -> &[T] {
        &self.values[row * self.cols()..(row + 1) * self.cols()]
    }

    pub fn column(&self, col: usize) -> Vec<T> {
        (0..self.rows()).map(|r| self.get(r, col)).collect()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Self {
        let col_labels = keep.iter().map(|&c| self.col_labels[c].clone()).collect();
        let values = (0..self.rows()).flat_map(|r| keep.iter().map(move |&c| (r, c))).map(|(r, c)| self.get(r, c)).collect();
        Self { row_labels: self.row_labels.clone(), col_labels, values }
    }

    /// Header row `word<TAB>collection...`, then one row per word.
    pub fn read_tsv<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader.lines().enumerate().filter(|(_, l)| {
            l.as_ref().map_or(true, |l| !l.trim().is_empty() && !l.starts_with('#'))
        });
        let (_, header) = lines.next().ok_or(ReduceError::Parse { line: 1, reason: "missing header".into() })?;
        let header = header?;
        let col_labels: Vec<String> = header.split('\t').skip(1).map(str::to_string).collect();
        let mut row_labels = Vec::new();
        let mut values = Vec::new();
        for (i, line) in lines {
            let line = line?;
            let mut fields = line.split('\t');
            let word = fields.next().unwrap_or_default().to_string();
            let row: Vec<&str> = fields.collect();
            if row.len() != col_labels.len() {
                return Err(ReduceError::Parse {
                    line: i + 1,
                    reason: format!("{} values for {} columns", row.len(), col_labels.len()),
                });
            }
            for f in row {
                let v: f64 = f.trim().parse().map_err(|_| ReduceError::Parse { line: i + 1, reason: format!("bad number {f:?}") })?;
                values.push(T::of(v));
            }
            row_labels.push(word);
        }
        Self::new(row_labels, col_labels, values)
    }

    pub fn write_tsv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "word")?;
        for c in &self.col_labels {
            write!(w, "\t{c}")?;
        }
        writeln!(w)?;
        for (r, label) in self.row_labels.iter().enumerate() {
            write!(w, "{label}")?;
            for v in self.row(r) {
                write!(w, "\t{v}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// `(Σ|aᵢ − bᵢ|^p)^(1/p)`.
pub fn minkowski<T: Scalar>(a: &[T], b: &[T], p: T) -> Result<T> {
    if a.len() != b.len() {
        return Err(ReduceError::LengthMismatch(a.len(), b.len()));
    }
    if p.is_nan() || p < T::one() {
        return Err(ReduceError::BadExponent(p.to_f64_lossy()));
    }
    if p == T::one() {
        return Ok(a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).sum());
    }
    if p == T::of(2.0) {
        return Ok(a.iter().zip(b).map(|(&x, &y)| (x - y) * (x - y)).sum::<T>().sqrt());
    }
    if p.is_infinite() {
        return Ok(a.iter().zip(b).map(|(&x, &y)| (x - y).abs()).fold(T::zero(), T::max));
    }
    Ok(a.iter().zip(b).map(|(&x, &y)| (x - y).abs().powf(p)).sum::<T>().powf(p.recip()))
}
