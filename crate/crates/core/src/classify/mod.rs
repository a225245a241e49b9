//! Judge agreement, training-set assembly and cross-validated classifiers
//! for telling valid cue words from unrelated or rejected ones.

mod agreement;
mod dataset;
mod eval;
mod folds;
mod models;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use agreement::{
    agreement, consensus_statuses, read_annotations, AgreementCounts, AgreementReport, Annotation, LandisKoch,
};
pub use dataset::{
    build_dataset, featurize, sample_unrelated, Dataset, DatasetInputs, Features, LabeledExample,
    DATASET_SHUFFLE_SEED,
};
pub use eval::{evaluate, metrics, train_eval, ClassifierReport, Confusion, EvalReport, MetricFlags, Metrics};
pub use folds::{kfold, FoldAssignment};
pub use models::{ClassifierSpec, SgdConfig, TrainedModel};

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("annotations file line {line}: {reason}")]
    BadAnnotation { line: u64, reason: String },
    #[error("duplicate annotated word {0:?}")]
    DuplicateWord(String),
    #[error("agreement needs at least 2 annotations, got {0}")]
    TooFewAnnotations(usize),
    #[error("kappa undefined: chance agreement is 1")]
    KappaUndefined,
    #[error("only {found} of {requested} unrelated tokens qualified")]
    NotEnoughUnrelated { found: usize, requested: usize },
    #[error("word {0:?} appears in more than one input list")]
    OverlappingLists(String),
    #[error("word {0:?} is out of vocabulary in every model")]
    AllModelsOov(String),
    #[error("degenerate dataset: {0}")]
    DegenerateDataset(String),
    #[error("k = {k} folds is invalid for {n} examples")]
    InvalidFolds { k: usize, n: usize },
    #[error("fold assignment covers {folds} examples but dataset has {dataset}")]
    FoldMismatch { folds: usize, dataset: usize },
    #[error("bad classifier spec {0:?}")]
    BadSpec(String),
    #[error(transparent)]
    Embedding(#[from] crate::embedding::EmbeddingError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ClassifyError> = std::result::Result<T, E>;

/// Binary judgement; `Pos` means "valid uncertainty cue word".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Pos,
    Neg,
}

impl Label {
    pub fn is_pos(self) -> bool {
        self == Label::Pos
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "pos" => Ok(Label::Pos),
            "neg" => Ok(Label::Neg),
            other => Err(format!("expected pos or neg, got {other:?}")),
        }
    }
}
