//! Expansion and analysis of uncertainty cue-word lexicons.
//!
//! The crate grows a hand-built seed lexicon through the nearest neighbors of
//! pre-trained word2vec models, and provides the analyses that go with it:
//! corpus cue statistics, inter-judge agreement and classifiers, similarity
//! graph clustering and ranking, and PCA/MDS over score matrices.
//!
//! Numerical code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64` for ordinary use.

pub mod classify;
pub mod corpus;
pub mod cue_graph;
pub mod embedding;
pub mod expansion;
pub mod lexicon;
pub mod pattern;
pub mod reduce;
pub mod scalar;

pub use embedding::{EmbeddingModel, ModelFormat, NeighborResult};
pub use expansion::{CandidatePair, CandidateSet, ExpansionRun, Score, Status};
pub use lexicon::{SeedEntry, SeedLexicon};
pub use pattern::{MatchKind, MatchPattern};
pub use scalar::Scalar;

pub type Graph = cue_graph::CueGraph<f64>;
pub type Ranks = cue_graph::PageRankVector<f64>;
pub type Dataset = classify::Dataset<f64>;
pub type Metrics = classify::Metrics<f64>;
pub type EvalReport = classify::EvalReport<f64>;
pub type ScoreMatrix = reduce::ScoreMatrix<f64>;
pub type Pca = reduce::PcaResult<f64>;
pub type Mds = reduce::MdsResult<f64>;
