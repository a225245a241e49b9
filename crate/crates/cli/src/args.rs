use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "cuelex", version, about = "Uncertainty cue-word lexicon expansion and analysis")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand. A `--config` JSON file may set any
/// of them under the same (snake_case) names; flags win.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Common {
    /// JSON file mirroring these flags.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Embedding model file; repeat for several models.
    #[arg(long = "model", global = true)]
    pub model: Vec<PathBuf>,
    /// `binary`, `text` or `auto` (by extension); one value for all models
    /// or one per model.
    #[arg(long = "model-format", global = true)]
    pub model_format: Vec<String>,
    /// Seed lexicon file (defaults to the bundled list).
    #[arg(long, global = true)]
    pub seeds: Option<PathBuf>,
    /// Neighbors retrieved per seed form.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// JSONL file or directory of .txt documents.
    #[arg(long, global = true)]
    pub corpus: Option<PathBuf>,
    /// File with one indicator per line, or a comma-separated list.
    #[arg(long, global = true)]
    pub indicators: Option<String>,
    /// CSV with word, judge1, judge2 columns.
    #[arg(long, global = true)]
    pub annotations: Option<PathBuf>,
    /// Seed for every random choice (shuffles, sampling, Louvain order).
    #[arg(long = "rng-seed", global = true)]
    pub rng_seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker thread cap.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Omit the timestamp from output headers.
    #[arg(long, global = true)]
    pub reproducible: bool,
}

impl Common {
    /// Fills unset fields from `file`.
    pub fn merge(self, file: Common) -> Common {
        Common {
            config: self.config,
            model: if self.model.is_empty() { file.model } else { self.model },
            model_format: if self.model_format.is_empty() { file.model_format } else { self.model_format },
            seeds: self.seeds.or(file.seeds),
            k: self.k.or(file.k),
            corpus: self.corpus.or(file.corpus),
            indicators: self.indicators.or(file.indicators),
            annotations: self.annotations.or(file.annotations),
            rng_seed: self.rng_seed.or(file.rng_seed),
            out: self.out.or(file.out),
            threads: self.threads.or(file.threads),
            reproducible: self.reproducible || file.reproducible,
        }
    }
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Nearest-neighbor expansion of the seeds in each model.
    Expand(ExpandArgs),
    /// Candidates found by every model.
    Intersect(IntersectArgs),
    /// Attach PMI and TF-IDF to candidates.
    Score(ScoreArgs),
    /// Split corpus sentences by indicator words.
    Split(SplitArgs),
    /// S+/S- cue ratios.
    Ratios(RatiosArgs),
    /// Document-hit scores relative to a baseline word, per collection.
    Relscore(RelscoreArgs),
    /// Share of items per collection matching a query.
    Rates(RatesArgs),
    /// Sentences containing cue words.
    Find(FindArgs),
    /// Build the seed/candidate similarity graph.
    Graph(GraphArgs),
    /// Louvain communities of a graph.
    Cluster(ClusterArgs),
    /// PageRank of a graph.
    Rank(RankArgs),
    /// Write a graph as GEXF or TSV.
    Export(ExportArgs),
    /// Two-judge agreement.
    Agree,
    /// Labelled feature set for the classifiers.
    Dataset(DatasetArgs),
    /// Cross-validated classifier evaluation.
    Train(TrainArgs),
    /// PCA of a word × collection score matrix.
    Pca(PcaArgs),
    /// MDS of the collections of a score matrix.
    Mds(MdsArgs),
    /// expand, intersect and score, then write the review file.
    Pipeline(PipelineArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Expand(_) => "expand",
            Command::Intersect(_) => "intersect",
            Command::Score(_) => "score",
            Command::Split(_) => "split",
            Command::Ratios(_) => "ratios",
            Command::Relscore(_) => "relscore",
            Command::Rates(_) => "rates",
            Command::Find(_) => "find",
            Command::Graph(_) => "graph",
            Command::Cluster(_) => "cluster",
            Command::Rank(_) => "rank",
            Command::Export(_) => "export",
            Command::Agree => "agree",
            Command::Dataset(_) => "dataset",
            Command::Train(_) => "train",
            Command::Pca(_) => "pca",
            Command::Mds(_) => "mds",
            Command::Pipeline(_) => "pipeline",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExpandArgs {
    /// Exact-case neighbor retrieval.
    #[arg(long)]
    pub no_fold: bool,
    /// Only load tokens listed in this file (one per line).
    #[arg(long)]
    pub vocab: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct IntersectArgs {
    /// Pair files written by `expand`.
    #[arg(long = "pairs", required = true)]
    pub pairs: Vec<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScoreArgs {
    /// Candidate JSON written by `intersect`.
    #[arg(long)]
    pub candidates: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SplitArgs {
    /// Down-sample the larger side to the smaller one.
    #[arg(long)]
    pub balance: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RatiosArgs {
    /// Word file or comma list; defaults to the seed surfaces.
    #[arg(long)]
    pub words: Option<String>,
    /// Down-sample the larger side before counting.
    #[arg(long)]
    pub balance: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RelscoreArgs {
    /// JSON manifest mapping collection names to corpus paths.
    #[arg(long)]
    pub collections: PathBuf,
    /// Word file or comma list; defaults to the seed surfaces.
    #[arg(long)]
    pub words: Option<String>,
    #[arg(long, default_value = "knowledge")]
    pub baseline: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RatesArgs {
    #[arg(long)]
    pub collections: PathBuf,
    /// Query words (OR); defaults to the consensus-failure cues.
    #[arg(long)]
    pub words: Option<String>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct FindArgs {
    /// Cue file or comma list; defaults to the seed surfaces.
    #[arg(long)]
    pub words: Option<String>,
    /// Maximum sentences per cue.
    #[arg(long, default_value_t = 5)]
    pub limit: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GraphArgs {
    /// Pair files written by `expand`.
    #[arg(long = "pairs", required = true)]
    pub pairs: Vec<PathBuf>,
    /// Candidate JSON whose statuses label the nodes.
    #[arg(long)]
    pub candidates: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClusterArgs {
    /// Graph JSON written by `graph`.
    #[arg(long)]
    pub graph: PathBuf,
    /// Louvain resolution; larger values give smaller communities.
    #[arg(long, default_value_t = 1.0)]
    pub resolution: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RankArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// PageRank damping factor.
    #[arg(long, default_value_t = 0.85)]
    pub damping: f64,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iter: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExportArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// gexf, node_tsv or edge_tsv.
    #[arg(long, default_value = "gexf")]
    pub format: String,
    #[arg(long, default_value_t = 1.0)]
    pub resolution: f64,
    #[arg(long, default_value_t = 0.85)]
    pub damping: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct DatasetArgs {
    /// Number of unrelated negatives drawn from the first model.
    #[arg(long, default_value_t = 0)]
    pub unrelated: usize,
    /// Similarity ceiling for unrelated words.
    #[arg(long, default_value_t = 0.2)]
    pub max_sim: f32,
    /// Add the seeds as positives.
    #[arg(long)]
    pub include_seeds: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    /// Dataset JSON written by `dataset`.
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    /// Comma list, e.g. knn:5,naive_bayes,logistic_sgd,mlp.
    #[arg(long, default_value = "knn:5,naive_bayes,logistic_sgd,mlp")]
    pub classifiers: String,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PcaArgs {
    /// Word × collection TSV.
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, default_value_t = 7)]
    pub components: usize,
    /// Use the covariance instead of the correlation matrix.
    #[arg(long)]
    pub no_standardize: bool,
    /// Words listed per component.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct MdsArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    /// Minkowski exponent.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PipelineArgs {
    #[arg(long)]
    pub no_fold: bool,
    #[arg(long)]
    pub vocab: Option<PathBuf>,
}
