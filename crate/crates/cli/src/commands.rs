//! One function per subcommand; each reads its inputs, calls the library
//! and writes TSV/JSON twins.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use cuelex::classify::{self, ClassifierSpec, Label};
use cuelex::corpus::{self, Balance, DocumentCollection, Segmenter, SentenceCorpus, CONSENSUS_FAILURE_CUES};
use cuelex::cue_graph::{self, CueGraph, Edge, ExportFormat, Node, Partition};
use cuelex::expansion::{self, CandidateSet, ExpansionRun, DEFAULT_K};
use cuelex::reduce::{self, MdsOptions, PcaOptions};
use cuelex::{EmbeddingModel, MatchPattern, ModelFormat, SeedLexicon, Status};

use crate::args::*;
use crate::output::{read_data, read_text};
use crate::{Context, Failure};

pub fn run(ctx: &mut Context, command: &Command) -> Result<(), Failure> {
    match command {
        Command::Expand(a) => expand(ctx, a),
        Command::Intersect(a) => intersect(ctx, a),
        Command::Score(a) => score(ctx, a),
        Command::Split(a) => split(ctx, a),
        Command::Ratios(a) => ratios(ctx, a),
        Command::Relscore(a) => relscore(ctx, a),
        Command::Rates(a) => rates(ctx, a),
        Command::Find(a) => find(ctx, a),
        Command::Graph(a) => graph(ctx, a),
        Command::Cluster(a) => cluster(ctx, a),
        Command::Rank(a) => rank(ctx, a),
        Command::Export(a) => export(ctx, a),
        Command::Agree => agree(ctx),
        Command::Dataset(a) => dataset(ctx, a),
        Command::Train(a) => train(ctx, a),
        Command::Pca(a) => pca(ctx, a),
        Command::Mds(a) => mds(ctx, a),
        Command::Pipeline(a) => pipeline(ctx, a),
    }
}

fn required<'a, T>(value: &'a Option<T>, flag: &str) -> Result<&'a T, Failure> {
    value.as_ref().ok_or_else(|| Failure::Input(format!("{flag} is required")))
}

fn with_path<E: std::fmt::Display>(path: &Path) -> impl Fn(E) -> Failure + '_ {
    move |e| Failure::Input(format!("{}: {e}", path.display()))
}

fn lexicon(ctx: &Context) -> Result<SeedLexicon, Failure> {
    match &ctx.common.seeds {
        Some(path) => Ok(SeedLexicon::load(path)?),
        None => Ok(SeedLexicon::bundled()),
    }
}

fn model_format(path: &Path, spec: Option<&String>) -> Result<ModelFormat, Failure> {
    match spec.map(String::as_str) {
        None | Some("auto") => Ok(if path.extension().is_some_and(|e| e == "bin") {
            ModelFormat::Binary
        } else {
            ModelFormat::Text
        }),
        Some(s) => s.parse().map_err(Failure::Input),
    }
}

fn models(ctx: &Context, vocab: Option<&PathBuf>) -> Result<Vec<EmbeddingModel>, Failure> {
    let paths = &ctx.common.model;
    if paths.is_empty() {
        return Err(Failure::Input("--model is required".into()));
    }
    let formats = &ctx.common.model_format;
    if formats.len() > 1 && formats.len() != paths.len() {
        return Err(Failure::Input(format!(
            "{} --model-format values for {} models",
            formats.len(),
            paths.len()
        )));
    }
    let filter: Option<HashSet<String>> = match vocab {
        Some(p) => Some(read_text(p)?.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect()),
        None => None,
    };
    let mut names = HashSet::new();
    let mut out = Vec::new();
    for (i, path) in paths.iter().enumerate() {
        let fmt = model_format(path, formats.get(i).or(formats.first()))?;
        let model = EmbeddingModel::load(path, fmt, filter.as_ref()).map_err(with_path(path))?;
        if !names.insert(model.name().to_string()) {
            return Err(Failure::Input(format!("two models are named {:?}", model.name())));
        }
        eprintln!("loaded {} ({} tokens, dim {})", model.name(), model.len(), model.dim());
        out.push(model);
    }
    Ok(out)
}

fn load_corpus(ctx: &Context) -> Result<SentenceCorpus, Failure> {
    let path = required(&ctx.common.corpus, "--corpus")?;
    Ok(SentenceCorpus::load(path, &Segmenter::default())?)
}

/// A file with one entry per line, or a comma-separated list.
fn word_list(spec: Option<&String>, default: impl FnOnce() -> Vec<String>) -> Result<Vec<String>, Failure> {
    let Some(spec) = spec else {
        return Ok(default());
    };
    let path = Path::new(spec);
    let items: Vec<String> = if path.is_file() {
        read_text(path)?
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(String::from)
            .collect()
    } else {
        spec.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect()
    };
    if items.is_empty() {
        return Err(Failure::Input(format!("word list {spec:?} is empty")));
    }
    Ok(items)
}

fn patterns(words: &[String]) -> Result<Vec<MatchPattern>, Failure> {
    let mut seen = HashSet::new();
    let unique: Vec<&String> = words.iter().filter(|w| seen.insert(w.to_lowercase())).collect();
    Ok(corpus::parse_patterns(&unique)?)
}

fn seed_words(lex: &SeedLexicon) -> Vec<String> {
    lex.entries().iter().map(|e| e.surface.clone()).collect()
}

fn indicators(ctx: &Context) -> Result<Vec<MatchPattern>, Failure> {
    let words = word_list(ctx.common.indicators.as_ref(), || CONSENSUS_FAILURE_CUES.map(String::from).to_vec())?;
    patterns(&words)
}

fn load_collections(path: &Path) -> Result<Vec<DocumentCollection>, Failure> {
    DocumentCollection::load_manifest(path, &Segmenter::default()).map_err(with_path(path))
}

fn expand_all(ctx: &mut Context, models: &[EmbeddingModel], lex: &SeedLexicon, fold: bool) -> Result<Vec<ExpansionRun>, Failure> {
    let k = ctx.common.k.unwrap_or(DEFAULT_K);
    if k == 0 {
        return Err(Failure::Input("--k must be positive".into()));
    }
    let mut runs = Vec::new();
    for m in models {
        let run = expansion::expand(m, lex, k, fold);
        for s in &run.skipped {
            log::warn!("{}: seed {:?} ({}) skipped: {}", run.model, s.seed, s.form, s.reason);
        }
        println!(
            "{}\tpairs={}\tdistinct={}\tskipped_seeds={}",
            run.model,
            run.pairs.len(),
            run.distinct_candidates().len(),
            run.skipped.len()
        );
        ctx.out.table(&format!("pairs.{}.tsv", run.model), |w| run.write_pairs_tsv(w))?;
        ctx.out.json(&format!("pairs.{}.json", run.model), &run)?;
        runs.push(run);
    }
    Ok(runs)
}

fn expand(ctx: &mut Context, a: &ExpandArgs) -> Result<(), Failure> {
    let lex = lexicon(ctx)?;
    let models = models(ctx, a.vocab.as_ref())?;
    expand_all(ctx, &models, &lex, !a.no_fold)?;
    Ok(())
}

fn read_runs(paths: &[PathBuf]) -> Result<Vec<ExpansionRun>, Failure> {
    let mut by_model: BTreeMap<String, ExpansionRun> = BTreeMap::new();
    for p in paths {
        let pairs = expansion::read_pairs_tsv(&read_text(p)?).map_err(with_path(p))?;
        for pair in pairs {
            by_model
                .entry(pair.model.clone())
                .or_insert_with(|| ExpansionRun { model: pair.model.clone(), k: 0, pairs: Vec::new(), skipped: Vec::new() })
                .pairs
                .push(pair);
        }
    }
    Ok(by_model.into_values().collect())
}

fn write_candidates(ctx: &mut Context, stem: &str, set: &CandidateSet) -> Result<(), Failure> {
    ctx.out.table(&format!("{stem}.tsv"), |w| set.write_tsv(w))?;
    ctx.out.json(&format!("{stem}.json"), set)
}

fn intersect(ctx: &mut Context, a: &IntersectArgs) -> Result<(), Failure> {
    let lex = lexicon(ctx)?;
    let runs = read_runs(&a.pairs)?;
    let refs: Vec<&ExpansionRun> = runs.iter().collect();
    let set = expansion::intersect_runs(&refs, &lex)?;
    println!("models={}\tcandidates={}", runs.len(), set.len());
    write_candidates(ctx, "candidates", &set)
}

fn score(ctx: &mut Context, a: &ScoreArgs) -> Result<(), Failure> {
    let lex = lexicon(ctx)?;
    let set: CandidateSet = read_data(&a.candidates)?;
    let corpus = load_corpus(ctx)?;
    let scored = expansion::score_candidates(&set, &corpus, &lex)?;
    println!("candidates={}\tsentences={}", scored.len(), corpus.num_sentences());
    write_candidates(ctx, "candidates.scored", &scored)
}

#[derive(Serialize)]
struct SplitRow<'a> {
    doc_id: &'a str,
    sentence_index: usize,
    side: &'static str,
}

fn balance(ctx: &Context, on: bool) -> Balance {
    if on {
        Balance::Equalize { rng_seed: ctx.rng_seed }
    } else {
        Balance::None
    }
}

fn split(ctx: &mut Context, a: &SplitArgs) -> Result<(), Failure> {
    let corpus = load_corpus(ctx)?;
    let result = corpus::split_corpus(&corpus, &indicators(ctx)?, balance(ctx, a.balance))?;
    let mut rows: Vec<SplitRow> = Vec::new();
    for (side, refs) in [("s_plus", &result.s_plus), ("s_minus", &result.s_minus)] {
        rows.extend(refs.iter().map(|&r| SplitRow { doc_id: corpus.doc_id(r), sentence_index: r.sentence, side }));
    }
    println!("s_plus={}\ts_minus={}", result.s_plus.len(), result.s_minus.len());
    ctx.out.table("split.tsv", |w| {
        writeln!(w, "doc_id\tsentence_index\tside")?;
        for r in &rows {
            writeln!(w, "{}\t{}\t{}", r.doc_id, r.sentence_index, r.side)?;
        }
        Ok(())
    })?;
    ctx.out.json(
        "split.json",
        &serde_json::json!({
            "indicators": result.indicators,
            "balanced": result.balanced,
            "s_plus": result.s_plus.len(),
            "s_minus": result.s_minus.len(),
            "sentences": rows,
        }),
    )
}

fn ratios(ctx: &mut Context, a: &RatiosArgs) -> Result<(), Failure> {
    let lex = lexicon(ctx)?;
    let corpus = load_corpus(ctx)?;
    let words = patterns(&word_list(a.words.as_ref(), || seed_words(&lex))?)?;
    let result = corpus::split_corpus(&corpus, &indicators(ctx)?, balance(ctx, a.balance))?;
    let rows = corpus::ratio_table(&corpus, &words, &result)?;
    println!("s_plus={}\ts_minus={}\twords={}", result.s_plus.len(), result.s_minus.len(), rows.len());
    ctx.out.table("ratios.tsv", |w| {
        writeln!(w, "word\tn_plus\tpct_plus\tn_minus\tpct_minus\tratio")?;
        for r in &rows {
            writeln!(w, "{}\t{}\t{:.3}\t{}\t{:.3}\t{}", r.word, r.n_plus, r.pct_plus, r.n_minus, r.pct_minus, r.ratio)?;
        }
        Ok(())
    })?;
    ctx.out.json(
        "ratios.json",
        &serde_json::json!({ "s_plus": result.s_plus.len(), "s_minus": result.s_minus.len(), "rows": rows }),
    )
}

fn relscore(ctx: &mut Context, a: &RelscoreArgs) -> Result<(), Failure> {
    let lex = lexicon(ctx)?;
    let words = patterns(&word_list(a.words.as_ref(), || seed_words(&lex))?)?;
    let baseline = MatchPattern::parse(&a.baseline)
        .ok_or_else(|| Failure::Input(format!("baseline {:?} has nothing to match", a.baseline)))?;
    let collections = load_collections(&a.collections)?;
    let mut long = Vec::new();
    let mut columns = Vec::new();
    for c in &collections {
        let scores = corpus::relative_scores(c, &words, &baseline)
            .map_err(|e| Failure::Input(format!("collection {:?}: {e}", c.group_id)))?;
        columns.push(scores.iter().map(|s| s.score).collect::<Vec<f64>>());
        long.extend(scores.into_iter().map(|s| (c.group_id.clone(), s)));
    }
    let row_labels: Vec<String> = words.iter().map(ToString::to_string).collect();
    let col_labels: Vec<String> = collections.iter().map(|c| c.group_id.clone()).collect();
    let values = (0..row_labels.len()).flat_map(|r| columns.iter().map(move |c| c[r])).collect();
    let matrix = cuelex::ScoreMatrix::new(row_labels, col_labels, values)?;
    println!("collections={}\twords={}", collections.len(), words.len());
    ctx.out.table("relscore.tsv", |w| {
        writeln!(w, "collection\tword\thits\tbaseline_hits\tscore")?;
        for (g, s) in &long {
            writeln!(w, "{g}\t{}\t{}\t{}\t{:.6}", s.word, s.hits, s.baseline_hits, s.score)?;
        }
        Ok(())
    })?;
    let rows: Vec<_> = long.iter().map(|(g, s)| serde_json::json!({ "collection": g, "score": s })).collect();
    ctx.out.json("relscore.json", &serde_json::json!({ "baseline": a.baseline, "rows": rows }))?;
    ctx.out.table("scores.matrix.tsv", |w| matrix.write_tsv(w))
}

fn rates(ctx: &mut Context, a: &RatesArgs) -> Result<(), Failure> {
    let words = patterns(&word_list(a.words.as_ref(), || CONSENSUS_FAILURE_CUES.map(String::from).to_vec())?)?;
    let collections = load_collections(&a.collections)?;
    let rows = corpus::uncertainty_rate(&collections, &words)?;
    ctx.out.table("rates.tsv", |w| {
        writeln!(w, "collection\tmatched\ttotal\trate\tpercent")?;
        for r in &rows {
            writeln!(w, "{}\t{}\t{}\t{:.6}\t{}", r.group, r.matched, r.total, r.rate, r.percent_rounded())?;
        }
        Ok(())
    })?;
    for r in &rows {
        println!("{}\t{}/{}\t{}%", r.group, r.matched, r.total, r.percent_rounded());
    }
    let query: Vec<String> = words.iter().map(ToString::to_string).collect();
    ctx.out.json("rates.json", &serde_json::json!({ "query": query, "rows": rows }))
}

fn find(ctx: &mut Context, a: &FindArgs) -> Result<(), Failure> {
    let lex = lexicon(ctx)?;
    if a.limit == 0 {
        return Err(Failure::Input("--limit must be positive".into()));
    }
    let corpus = load_corpus(ctx)?;
    let cues = patterns(&word_list(a.words.as_ref(), || seed_words(&lex))?)?;
    let rows = corpus::find_sentences(&corpus, &cues, a.limit);
    println!("sentences={}", rows.len());
    ctx.out.table("sentences.tsv", |w| {
        writeln!(w, "doc_id\tsentence_index\tcues\tsentence")?;
        for r in &rows {
            writeln!(w, "{}\t{}\t{}\t{}", r.doc_id, r.sentence_index, r.cues.join(","), r.sentence.replace(['\t', '\n'], " "))?;
        }
        Ok(())
    })?;
    ctx.out.json("sentences.json", &rows)
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    nodes: Vec<Node>,
    edges: Vec<Edge<f64>>,
}

fn load_graph(path: &Path) -> Result<CueGraph<f64>, Failure> {
    let file: GraphFile = read_data(path)?;
    CueGraph::new(file.nodes, file.edges).map_err(with_path(path))
}

fn statuses(ctx: &Context, candidates: Option<&PathBuf>) -> Result<HashMap<String, Status>, Failure> {
    if let Some(p) = candidates {
        let set: CandidateSet = read_data(p)?;
        return Ok(set.statuses());
    }
    if let Some(p) = &ctx.common.annotations {
        let file = std::fs::File::open(p).map_err(with_path(p))?;
        let ann = classify::read_annotations(file).map_err(with_path(p))?;
        return Ok(classify::consensus_statuses(&ann));
    }
    Ok(HashMap::new())
}

fn graph(ctx: &mut Context, a: &GraphArgs) -> Result<(), Failure> {
    let lex = lexicon(ctx)?;
    let pairs: Vec<_> = read_runs(&a.pairs)?.into_iter().flat_map(|r| r.pairs).collect();
    let st = statuses(ctx, a.candidates.as_ref())?;
    let g = cue_graph::build::<f64>(&pairs, &lex, &st)?;
    println!("nodes={}\tedges={}", g.num_nodes(), g.num_edges());
    ctx.out.table("graph.edges.tsv", |w| cue_graph::write_edge_tsv(&g, w).map_err(std::io::Error::other))?;
    ctx.out.json("graph.json", &GraphFile { nodes: g.nodes().to_vec(), edges: g.edges().to_vec() })
}

fn cluster(ctx: &mut Context, a: &ClusterArgs) -> Result<(), Failure> {
    let g = load_graph(&a.graph)?;
    let outcome = cue_graph::louvain(&g, a.resolution, ctx.rng_seed)?;
    let q = cue_graph::modularity_with_resolution(&g, &outcome.partition, a.resolution)?;
    let comp = cue_graph::composition(&g, &outcome.partition)?;
    println!("communities={}\tmodularity={q:.6}", outcome.partition.num_communities());
    ctx.out.table("communities.tsv", |w| {
        writeln!(w, "word\tcommunity\tlabel")?;
        for (i, n) in g.nodes().iter().enumerate() {
            writeln!(w, "{}\t{}\t{}", n.word, outcome.partition.community_of(i), cue_graph::format_label(&n.word, n.is_seed, n.status))?;
        }
        Ok(())
    })?;
    ctx.out.table("composition.tsv", |w| {
        writeln!(w, "community\tsize\tseed\taccepted\trejected\tunrated")?;
        for r in &comp {
            writeln!(w, "{}\t{}\t{}\t{}\t{}\t{}", r.community, r.size(), r.n_seed, r.n_accepted, r.n_rejected, r.n_unrated)?;
        }
        Ok(())
    })?;
    let words: Vec<&str> = g.nodes().iter().map(|n| n.word.as_str()).collect();
    ctx.out.json(
        "communities.json",
        &serde_json::json!({
            "words": words,
            "partition": outcome.partition,
            "modularity": q,
            "level_modularity": outcome.level_modularity,
            "composition": comp,
        }),
    )
}

fn rank(ctx: &mut Context, a: &RankArgs) -> Result<(), Failure> {
    let g = load_graph(&a.graph)?;
    let pr = pagerank(&g, a.damping, a.tol, a.max_iter)?;
    let mut order: Vec<usize> = (0..g.num_nodes()).collect();
    order.sort_by(|&x, &y| pr.scores[y].total_cmp(&pr.scores[x]).then_with(|| g.nodes()[x].word.cmp(&g.nodes()[y].word)));
    println!("nodes={}\titerations={}", g.num_nodes(), pr.iterations);
    ctx.out.table("pagerank.tsv", |w| {
        writeln!(w, "word\tpagerank")?;
        for &i in &order {
            writeln!(w, "{}\t{:.10}", g.nodes()[i].word, pr.scores[i])?;
        }
        Ok(())
    })?;
    let rows: Vec<_> = order.iter().map(|&i| serde_json::json!({ "word": g.nodes()[i].word, "pagerank": pr.scores[i] })).collect();
    ctx.out.json("pagerank.json", &serde_json::json!({ "damping": a.damping, "iterations": pr.iterations, "rows": rows }))
}

fn pagerank(g: &CueGraph<f64>, damping: f64, tol: f64, max_iter: usize) -> Result<cuelex::Ranks, Failure> {
    cue_graph::pagerank(g, damping, tol, max_iter).map_err(|e| match e {
        cue_graph::GraphError::NotConverged { .. } => Failure::Internal(e.to_string()),
        other => Failure::Input(other.to_string()),
    })
}

fn export(ctx: &mut Context, a: &ExportArgs) -> Result<(), Failure> {
    let format: ExportFormat = a.format.parse().map_err(Failure::Input)?;
    let g = load_graph(&a.graph)?;
    let partition: Partition = cue_graph::louvain(&g, a.resolution, ctx.rng_seed)?.partition;
    let pr = pagerank(&g, a.damping, 1e-10, 1000)?;
    let mut buf = Vec::new();
    cue_graph::export(&g, &partition, &pr, format, &mut buf)?;
    match format {
        ExportFormat::Gexf => ctx.out.xml("graph.gexf", &buf),
        ExportFormat::NodeTsv => ctx.out.table("graph.nodes.tsv", |w| w.write_all(&buf)),
        ExportFormat::EdgeTsv => ctx.out.table("graph.edges.tsv", |w| w.write_all(&buf)),
    }
}

fn annotations(ctx: &Context) -> Result<Vec<classify::Annotation>, Failure> {
    let path = required(&ctx.common.annotations, "--annotations")?;
    let file = std::fs::File::open(path).map_err(with_path(path))?;
    classify::read_annotations(file).map_err(with_path(path))
}

fn agree(ctx: &mut Context) -> Result<(), Failure> {
    let report = classify::agreement(&annotations(ctx)?)?;
    let c = report.counts;
    println!("annotations\t{}", c.total());
    println!("percent_agreement\t{:.3}", report.percent_agreement);
    println!("kappa\t{:.4}", report.kappa);
    println!("band\t{}", report.band);
    ctx.out.table("agreement.tsv", |w| {
        writeln!(w, "metric\tvalue")?;
        writeln!(w, "pos_pos\t{}\npos_neg\t{}\nneg_pos\t{}\nneg_neg\t{}", c.pp, c.pn, c.np, c.nn)?;
        writeln!(w, "percent_agreement\t{:.6}", report.percent_agreement)?;
        writeln!(w, "expected_agreement\t{:.6}", report.expected_agreement)?;
        writeln!(w, "kappa\t{:.6}", report.kappa)?;
        writeln!(w, "band\t{}", report.band)
    })?;
    ctx.out.json("agreement.json", &report)
}

fn dataset(ctx: &mut Context, a: &DatasetArgs) -> Result<(), Failure> {
    let lex = lexicon(ctx)?;
    let ann = annotations(ctx)?;
    let models = models(ctx, None)?;
    let mut accepted = Vec::new();
    let mut rejected = Vec::new();
    for x in &ann {
        match (x.judge1, x.judge2) {
            (Label::Pos, Label::Pos) => accepted.push(x.word.clone()),
            (Label::Neg, Label::Neg) => rejected.push(x.word.clone()),
            _ => log::info!("judges disagree on {:?}; left out", x.word),
        }
    }
    let unrelated = if a.unrelated > 0 {
        let exclude: HashSet<String> = ann.iter().map(|x| x.word.to_lowercase()).collect();
        classify::sample_unrelated(&models[0], &lex, &exclude, a.unrelated, a.max_sim, ctx.rng_seed)?
    } else {
        Vec::new()
    };
    let inputs = classify::DatasetInputs {
        accepted,
        rejected,
        unrelated,
        seeds: a.include_seeds.then_some(&lex),
    };
    let refs: Vec<&EmbeddingModel> = models.iter().collect();
    let data = classify::build_dataset::<f64>(&inputs, &refs, ctx.rng_seed)?;
    println!("examples={}\tpositives={}\texcluded={}\tdim={}", data.len(), data.num_pos(), data.excluded.len(), data.dim);
    let names: Vec<&str> = models.iter().map(EmbeddingModel::name).collect();
    ctx.out.table("dataset.tsv", |w| {
        write!(w, "word\tlabel")?;
        for n in &names {
            write!(w, "\toov_{n}")?;
        }
        writeln!(w)?;
        for e in &data.examples {
            write!(w, "{}\t{}", e.word, if e.label.is_pos() { "pos" } else { "neg" })?;
            for &o in &e.features.oov {
                write!(w, "\t{}", u8::from(o))?;
            }
            writeln!(w)?;
        }
        Ok(())
    })?;
    ctx.out.json("dataset.json", &data)
}

fn train(ctx: &mut Context, a: &TrainArgs) -> Result<(), Failure> {
    let data: cuelex::Dataset = read_data(&a.dataset)?;
    let specs = a
        .classifiers
        .split(',')
        .map(|s| s.trim().parse::<ClassifierSpec>().map(|c| c.with_seed(ctx.rng_seed)))
        .collect::<Result<Vec<_>, _>>()?;
    let folds = classify::kfold(&data.labels(), a.folds, ctx.rng_seed)?;
    let report = classify::evaluate(&data, &specs, &folds)?;
    println!("classifier\taccuracy\tprecision\trecall\tf1");
    for r in &report.rows {
        let m = &r.metrics;
        println!("{}\t{:.4}\t{:.4}\t{:.4}\t{:.4}", r.classifier, m.accuracy, m.precision, m.recall, m.f1);
    }
    ctx.out.table("eval.tsv", |w| {
        writeln!(w, "classifier\taccuracy\tprecision\trecall\tf1\ttp\tfp\tfn\ttn\tundefined")?;
        for r in &report.rows {
            let (m, c) = (&r.metrics, &r.confusion);
            let mut flags = Vec::new();
            if m.flags.precision_undefined {
                flags.push("precision");
            }
            if m.flags.recall_undefined {
                flags.push("recall");
            }
            if m.flags.f1_undefined {
                flags.push("f1");
            }
            writeln!(
                w,
                "{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{}\t{}\t{}",
                r.classifier, m.accuracy, m.precision, m.recall, m.f1, c.tp, c.fp, c.fn_, c.tn, flags.join(",")
            )?;
        }
        Ok(())
    })?;
    ctx.out.json("eval.json", &report)
}

fn read_matrix(path: &Path) -> Result<cuelex::ScoreMatrix, Failure> {
    let file = std::fs::File::open(path).map_err(with_path(path))?;
    cuelex::ScoreMatrix::read_tsv(std::io::BufReader::new(file)).map_err(with_path(path))
}

fn pca(ctx: &mut Context, a: &PcaArgs) -> Result<(), Failure> {
    let m = read_matrix(&a.matrix)?;
    let opts = PcaOptions { n_components: a.components, standardize: !a.no_standardize };
    let r = reduce::pca(&m, &opts)?;
    let k = r.n_components();
    for (j, ratio) in r.explained_variance_ratio.iter().enumerate() {
        println!("PC{}\t{:.4}", j + 1, ratio);
    }
    let pcs: Vec<String> = (1..=k).map(|j| format!("PC{j}")).collect();
    ctx.out.table("pca.loadings.tsv", |w| {
        writeln!(w, "word\t{}", pcs.join("\t"))?;
        for (word, l) in r.words.iter().zip(&r.loadings) {
            let vals: Vec<String> = l.iter().map(|v| format!("{v:.6}")).collect();
            writeln!(w, "{word}\t{}", vals.join("\t"))?;
        }
        Ok(())
    })?;
    ctx.out.table("pca.components.tsv", |w| {
        writeln!(w, "collection\t{}", pcs.join("\t"))?;
        for (c, v) in r.collections.iter().zip(&r.components) {
            let vals: Vec<String> = v.iter().map(|x| format!("{x:.6}")).collect();
            writeln!(w, "{c}\t{}", vals.join("\t"))?;
        }
        Ok(())
    })?;
    ctx.out.table("pca.top.tsv", |w| {
        writeln!(w, "component\trank\tword\tloading")?;
        for j in 0..k {
            for (i, (word, l)) in r.top_words(j, a.top).into_iter().enumerate() {
                writeln!(w, "PC{}\t{}\t{word}\t{l:.6}", j + 1, i + 1)?;
            }
        }
        Ok(())
    })?;
    ctx.out.json("pca.json", &r)
}

fn mds(ctx: &mut Context, a: &MdsArgs) -> Result<(), Failure> {
    let m = read_matrix(&a.matrix)?;
    let opts = MdsOptions { p: a.p, dims: a.dims, max_iter: a.max_iter, tol: a.tol };
    let r = reduce::mds(&m, &opts)?;
    println!("items={}\tstress={:.6e}\titerations={}", r.items.len(), r.stress, r.iterations);
    ctx.out.table("mds.tsv", |w| {
        let dims: Vec<String> = (1..=a.dims).map(|d| format!("dim{d}")).collect();
        writeln!(w, "collection\t{}", dims.join("\t"))?;
        for (item, c) in r.items.iter().zip(&r.coordinates) {
            let vals: Vec<String> = c.iter().map(|x| format!("{x:.6}")).collect();
            writeln!(w, "{item}\t{}", vals.join("\t"))?;
        }
        Ok(())
    })?;
    ctx.out.json("mds.json", &r)
}

fn pipeline(ctx: &mut Context, a: &PipelineArgs) -> Result<(), Failure> {
    let lex = lexicon(ctx)?;
    let corpus = load_corpus(ctx)?;
    let models = models(ctx, a.vocab.as_ref())?;
    if models.len() < 2 {
        return Err(Failure::Input("pipeline needs at least two --model files".into()));
    }
    let runs = expand_all(ctx, &models, &lex, !a.no_fold)?;
    let refs: Vec<&ExpansionRun> = runs.iter().collect();
    let set = expansion::intersect_runs(&refs, &lex)?;
    let scored = expansion::score_candidates(&set, &corpus, &lex)?;
    println!("candidates={}", scored.len());
    write_candidates(ctx, "candidates", &scored)?;
    ctx.out.table("review.csv", |w| {
        let mut csv = csv::Writer::from_writer(w);
        csv.write_record(["word", "models", "seeds", "pmi", "tfidf", "judge1", "judge2"])?;
        for c in &scored.candidates {
            let models: Vec<&str> = c.provenance.keys().map(String::as_str).collect();
            let seeds: Vec<&str> = c.seeds().into_iter().collect();
            csv.write_record([
                c.word.as_str(),
                &models.join(";"),
                &seeds.join(";"),
                &c.pmi.to_string(),
                &c.tfidf.to_string(),
                "",
                "",
            ])?;
        }
        csv.flush()
    })
}
