//! Cross-validated evaluation with a confusion matrix pooled over folds.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ClassifierSpec, ClassifyError, Dataset, FoldAssignment, Label, Result};
use crate::scalar::Scalar;

/// Confusion counts with `Pos` as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl Confusion {
    pub fn record(&mut self, truth: Label, predicted: Label) {
        match (truth, predicted) {
            (Label::Pos, Label::Pos) => self.tp += 1,
            (Label::Neg, Label::Pos) => self.fp += 1,
            (Label::Pos, Label::Neg) => self.fn_ += 1,
            (Label::Neg, Label::Neg) => self.tn += 1,
        }
    }

    pub fn merge(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
        self.tn += other.tn;
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

/// Set where a ratio had a zero denominator (or, for F1, zero precision and
/// recall); the value is then reported as 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetricFlags {
    pub precision_undefined: bool,
    pub recall_undefined: bool,
    pub f1_undefined: bool,
}

impl MetricFlags {
    pub fn any(&self) -> bool {
        self.precision_undefined || self.recall_undefined || self.f1_undefined
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics<T> {
    pub accuracy: T,
    pub precision: T,
    pub recall: T,
    pub f1: T,
    pub flags: MetricFlags,
}

fn ratio<T: Scalar>(num: u64, den: u64) -> (T, bool) {
    if den == 0 {
        (T::zero(), true)
    } else {
        (T::of(num as f64) / T::of(den as f64), false)
    }
}

pub fn metrics<T: Scalar>(c: &Confusion) -> Metrics<T> {
    let (accuracy, _) = ratio::<T>(c.tp + c.tn, c.total());
    let (precision, precision_undefined) = ratio::<T>(c.tp, c.tp + c.fp);
    let (recall, recall_undefined) = ratio::<T>(c.tp, c.tp + c.fn_);
    let sum = precision + recall;
    let (f1, f1_undefined) = if sum > T::zero() {
        (T::of(2.0) * precision * recall / sum, false)
    } else {
        (T::zero(), true)
    };
    Metrics {
        accuracy,
        precision,
        recall,
        f1,
        flags: MetricFlags { precision_undefined, recall_undefined, f1_undefined },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport<T> {
    pub classifier: String,
    pub confusion: Confusion,
    pub per_fold: Vec<Confusion>,
    pub metrics: Metrics<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport<T> {
    pub k: usize,
    pub fold_digest: String,
    pub examples: usize,
    pub positives: usize,
    pub rows: Vec<ClassifierReport<T>>,
}

/// Trains on all folds but one and predicts the held-out fold, for every
/// fold. Folds run in parallel; confusions are merged in fold order.
pub fn train_eval<T: Scalar>(
    dataset: &Dataset<T>,
    spec: &ClassifierSpec,
    folds: &FoldAssignment,
) -> Result<ClassifierReport<T>> {
    if folds.len() != dataset.len() {
        return Err(ClassifyError::FoldMismatch { folds: folds.len(), dataset: dataset.len() });
    }
    let per_fold: Vec<Confusion> = (0..folds.k)
        .into_par_iter()
        .map(|f| {
            let train = folds.train_indices(f);
            let xs: Vec<&[T]> = train.iter().map(|&i| dataset.examples[i].features.values.as_slice()).collect();
            let ys: Vec<Label> = train.iter().map(|&i| dataset.examples[i].label).collect();
            let model = spec.fit(&xs, &ys);
            let mut c = Confusion::default();
            for i in folds.test_indices(f) {
                let ex = &dataset.examples[i];
                c.record(ex.label, model.predict(&ex.features.values));
            }
            c
        })
        .collect();
    let mut confusion = Confusion::default();
    for c in &per_fold {
        confusion.merge(c);
    }
    Ok(ClassifierReport { classifier: spec.to_string(), confusion, per_fold, metrics: metrics(&confusion) })
}

pub fn evaluate<T: Scalar>(
    dataset: &Dataset<T>,
    specs: &[ClassifierSpec],
    folds: &FoldAssignment,
) -> Result<EvalReport<T>> {
    let rows = specs.iter().map(|s| train_eval(dataset, s, folds)).collect::<Result<Vec<_>>>()?;
    Ok(EvalReport {
        k: folds.k,
        fold_digest: folds.digest(),
        examples: dataset.len(),
        positives: dataset.num_pos(),
        rows,
    })
}
