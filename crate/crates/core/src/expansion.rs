//! Seed-lexicon expansion through embedding neighborhoods.
//!
//! Each seed's model forms are queried for their nearest neighbors in one
//! model; the distinct candidates of two models are intersected; the
//! surviving words are annotated with PMI and TF-IDF scores against a
//! sentence corpus. Scores are metadata only and never remove candidates.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::SentenceCorpus;
use crate::embedding::EmbeddingModel;
use crate::lexicon::SeedLexicon;
use crate::pattern::MatchPattern;

/// Neighbors retrieved per seed form unless configured otherwise.
pub const DEFAULT_K: usize = 50;

#[derive(Debug, Error)]
pub enum ExpansionError {
    #[error("pattern {0:?} matches no sentence (insufficient evidence)")]
    InsufficientEvidence(String),
    #[error("word {0:?} occurs in no document")]
    WordAbsent(String),
    #[error("scoring corpus is empty")]
    EmptyCorpus,
    #[error("intersection needs runs from at least two distinct models, got {0:?}")]
    NotEnoughModels(Vec<String>),
    #[error("pairs file line {line}: {reason}")]
    BadPairs { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = ExpansionError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePair {
    /// Seed surface the neighbor was retrieved for.
    pub seed: String,
    /// Lowercased neighbor token.
    pub candidate: String,
    pub similarity: f32,
    pub model: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedSeed {
    pub seed: String,
    pub form: String,
    pub reason: String,
}

/// Result of expanding a lexicon against one model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRun {
    pub model: String,
    pub k: usize,
    pub pairs: Vec<CandidatePair>,
    pub skipped: Vec<SkippedSeed>,
}

impl ExpansionRun {
    pub fn distinct_candidates(&self) -> BTreeSet<String> {
        distinct_candidates(&self.pairs)
    }

    /// Writes the pairs as TSV with a fixed header and 6-decimal similarities.
    pub fn write_pairs_tsv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write_pairs_tsv(&self.pairs, w)
    }
}

pub fn write_pairs_tsv<W: Write>(pairs: &[CandidatePair], w: &mut W) -> std::io::Result<()> {
    writeln!(w, "seed\tcandidate\tsimilarity\tmodel")?;
    for p in pairs {
        writeln!(w, "{}\t{}\t{:.6}\t{}", p.seed, p.candidate, p.similarity, p.model)?;
    }
    Ok(())
}

/// Parses a pairs TSV; lines starting with `#` are skipped.
pub fn read_pairs_tsv(text: &str) -> Result<Vec<CandidatePair>> {
    let mut out = Vec::new();
    let mut header_seen = false;
    for (i, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let bad = |reason: &str| ExpansionError::BadPairs { line: i + 1, reason: reason.to_string() };
        if !header_seen {
            if line != "seed\tcandidate\tsimilarity\tmodel" {
                return Err(bad("expected header seed<TAB>candidate<TAB>similarity<TAB>model"));
            }
            header_seen = true;
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(bad("expected 4 columns"));
        }
        let similarity: f32 = cols[2].parse().map_err(|_| bad("similarity is not a number"))?;
        out.push(CandidatePair {
            seed: cols[0].to_string(),
            candidate: cols[1].to_string(),
            similarity,
            model: cols[3].to_string(),
        });
    }
    Ok(out)
}

/// Retrieves the `k` nearest neighbors of every seed form found in `model`.
///
/// Candidates are lowercased; candidates that are themselves seeds are
/// dropped; when several forms of one seed retrieve the same candidate the
/// best similarity is kept. Output is sorted by (seed, similarity desc,
/// candidate).
pub fn expand(model: &EmbeddingModel, lexicon: &SeedLexicon, k: usize, fold_case: bool) -> ExpansionRun {
    let seeds = lexicon.folded_terms();
    let queries: Vec<(usize, String)> = lexicon
        .entries()
        .iter()
        .enumerate()
        .flat_map(|(i, e)| e.model_forms.iter().map(move |f| (i, f.replace(' ', "_"))))
        .collect();
    let forms: Vec<String> = queries.iter().map(|(_, f)| f.clone()).collect();
    let results = model.top_k_batch(&forms, k, fold_case);

    let mut best: BTreeMap<(String, String), f32> = BTreeMap::new();
    let mut skipped = Vec::new();
    for ((entry_idx, form), result) in queries.into_iter().zip(results) {
        let surface = &lexicon.entries()[entry_idx].surface;
        match result {
            Err(e) => skipped.push(SkippedSeed { seed: surface.clone(), form, reason: e.to_string() }),
            Ok(neighbors) => {
                for n in neighbors {
                    let cand = n.neighbor.to_lowercase();
                    if seeds.contains(&cand) {
                        continue;
                    }
                    best.entry((surface.clone(), cand))
                        .and_modify(|s| *s = s.max(n.similarity))
                        .or_insert(n.similarity);
                }
            }
        }
    }
    if !skipped.is_empty() {
        log::info!("model {}: {} seed form(s) not found", model.name(), skipped.len());
    }
    let mut pairs: Vec<CandidatePair> = best
        .into_iter()
        .map(|((seed, candidate), similarity)| CandidatePair {
            seed,
            candidate,
            similarity,
            model: model.name().to_string(),
        })
        .collect();
    pairs.sort_by(|a, b| {
        a.seed
            .cmp(&b.seed)
            .then(b.similarity.total_cmp(&a.similarity))
            .then_with(|| a.candidate.cmp(&b.candidate))
    });
    ExpansionRun { model: model.name().to_string(), k, pairs, skipped }
}

pub fn distinct_candidates(pairs: &[CandidatePair]) -> BTreeSet<String> {
    pairs.iter().map(|p| p.candidate.clone()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    #[default]
    Unrated,
    Accepted,
    Rejected,
}

/// A score that may be missing for a stated reason.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Score {
    #[default]
    Unscored,
    Value(f64),
    /// Both patterns occur but never together.
    NegInfinity,
    /// The word (or every contributing seed) is absent from the corpus.
    NoEvidence,
}

impl Score {
    pub fn value(self) -> Option<f64> {
        match self {
            Score::Value(x) => Some(x),
            Score::NegInfinity => Some(f64::NEG_INFINITY),
            _ => None,
        }
    }
}

impl std::fmt::Display for Score {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Score::Unscored => f.write_str(""),
            Score::Value(x) => write!(f, "{x:.6}"),
            Score::NegInfinity => f.write_str("-inf"),
            Score::NoEvidence => f.write_str("no_evidence"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelEvidence {
    pub similarity: f32,
    pub seeds: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub word: String,
    /// Best similarity and contributing seeds per model name.
    pub provenance: BTreeMap<String, ModelEvidence>,
    pub pmi: Score,
    pub tfidf: Score,
    pub status: Status,
}

impl Candidate {
    fn unrated(word: String) -> Self {
        Self { word, provenance: BTreeMap::new(), pmi: Score::Unscored, tfidf: Score::Unscored, status: Status::Unrated }
    }

    /// Union of contributing seeds over all models, sorted.
    pub fn seeds(&self) -> BTreeSet<&str> {
        self.provenance.values().flat_map(|e| e.seeds.iter().map(String::as_str)).collect()
    }
}

/// Candidate words, unique and sorted.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub candidates: Vec<Candidate>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn words(&self) -> Vec<&str> {
        self.candidates.iter().map(|c| c.word.as_str()).collect()
    }

    pub fn statuses(&self) -> HashMap<String, Status> {
        self.candidates.iter().map(|c| (c.word.clone(), c.status)).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("candidate set serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Flat TSV view: word, models, seeds, per-model similarities, pmi, tfidf, status.
    pub fn write_tsv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "word\tmodels\tseeds\tsimilarities\tpmi\ttfidf\tstatus")?;
        for c in &self.candidates {
            let models: Vec<&str> = c.provenance.keys().map(String::as_str).collect();
            let seeds: Vec<&str> = c.seeds().into_iter().collect();
            let sims: Vec<String> = c.provenance.values().map(|e| format!("{:.6}", e.similarity)).collect();
            let status = serde_json::to_value(c.status).expect("status serializes");
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}",
                c.word,
                models.join(","),
                seeds.join(","),
                sims.join(","),
                c.pmi,
                c.tfidf,
                status.as_str().unwrap_or_default()
            )?;
        }
        Ok(())
    }
}

/// Words present in both sets, minus seed surfaces and model forms.
pub fn intersect(a: &BTreeSet<String>, b: &BTreeSet<String>, lexicon: &SeedLexicon) -> CandidateSet {
    let seeds = lexicon.folded_terms();
    CandidateSet {
        candidates: a
            .intersection(b)
            .filter(|w| !seeds.contains(*w))
            .map(|w| Candidate::unrated(w.clone()))
            .collect(),
    }
}

/// Intersects the candidates of every run and records per-model provenance.
pub fn intersect_runs(runs: &[&ExpansionRun], lexicon: &SeedLexicon) -> Result<CandidateSet> {
    let names: BTreeSet<&str> = runs.iter().map(|r| r.model.as_str()).collect();
    if runs.len() < 2 || names.len() != runs.len() {
        return Err(ExpansionError::NotEnoughModels(runs.iter().map(|r| r.model.clone()).collect()));
    }
    let mut common = runs[0].distinct_candidates();
    for r in &runs[1..] {
        let other = r.distinct_candidates();
        common = intersect(&common, &other, lexicon).words().into_iter().map(String::from).collect();
    }
    let mut set = intersect(&common, &common, lexicon);
    let index: HashMap<String, usize> =
        set.candidates.iter().enumerate().map(|(i, c)| (c.word.clone(), i)).collect();
    for run in runs {
        for p in &run.pairs {
            let Some(&i) = index.get(&p.candidate) else { continue };
            let ev = set.candidates[i]
                .provenance
                .entry(run.model.clone())
                .or_insert(ModelEvidence { similarity: p.similarity, seeds: Vec::new() });
            ev.similarity = ev.similarity.max(p.similarity);
            if !ev.seeds.contains(&p.seed) {
                ev.seeds.push(p.seed.clone());
            }
        }
    }
    for c in &mut set.candidates {
        for ev in c.provenance.values_mut() {
            ev.seeds.sort();
        }
    }
    Ok(set)
}

fn intersection_len(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Natural-log PMI from sentence-level counts.
fn pmi_from_hits(n: usize, x: &[u32], y: &[u32], xs: &str, ys: &str) -> Result<f64> {
    if n == 0 {
        return Err(ExpansionError::EmptyCorpus);
    }
    if x.is_empty() {
        return Err(ExpansionError::InsufficientEvidence(xs.to_string()));
    }
    if y.is_empty() {
        return Err(ExpansionError::InsufficientEvidence(ys.to_string()));
    }
    let nxy = intersection_len(x, y);
    if nxy == 0 {
        return Ok(f64::NEG_INFINITY);
    }
    let p_y_given_x = nxy as f64 / x.len() as f64;
    let p_y = y.len() as f64 / n as f64;
    Ok((p_y_given_x / p_y).ln())
}

/// `ln(p(y|x) / p(y))` over sentences. Returns negative infinity when both
/// patterns occur but never in the same sentence.
pub fn pmi(corpus: &SentenceCorpus, x: &MatchPattern, y: &MatchPattern) -> Result<f64> {
    let hx = corpus.sentence_hits(x);
    let hy = corpus.sentence_hits(y);
    pmi_from_hits(corpus.num_sentences(), &hx, &hy, &x.to_string(), &y.to_string())
}

/// Term frequency over all tokens times natural-log inverse document frequency.
pub fn tfidf(corpus: &SentenceCorpus, word: &MatchPattern) -> Result<f64> {
    let total_tokens = corpus.num_tokens();
    if total_tokens == 0 {
        return Err(ExpansionError::EmptyCorpus);
    }
    let mut cf = 0usize;
    let mut df = 0usize;
    for doc in corpus.documents() {
        let c: usize = doc.sentences.iter().map(|s| word.count(&s.tokens)).sum();
        cf += c;
        df += usize::from(c > 0);
    }
    if df == 0 {
        return Err(ExpansionError::WordAbsent(word.to_string()));
    }
    let tf = cf as f64 / total_tokens as f64;
    Ok(tf * (corpus.num_documents() as f64 / df as f64).ln())
}

/// Attaches TF-IDF and the maximum seed PMI to every candidate.
pub fn score_candidates(
    set: &CandidateSet,
    corpus: &SentenceCorpus,
    lexicon: &SeedLexicon,
) -> Result<CandidateSet> {
    if corpus.is_empty() {
        return Err(ExpansionError::EmptyCorpus);
    }
    let n = corpus.num_sentences();
    let seed_patterns = |seed: &str| {
        lexicon
            .get(seed)
            .map(|e| e.pattern())
            .or_else(|| MatchPattern::from_model_token(seed))
    };
    let mut seed_hits: HashMap<String, (String, Vec<u32>)> = HashMap::new();
    for c in &set.candidates {
        for s in c.seeds() {
            if !seed_hits.contains_key(s) {
                if let Some(p) = seed_patterns(s) {
                    seed_hits.insert(s.to_string(), (p.to_string(), corpus.sentence_hits(&p)));
                }
            }
        }
    }
    let candidates = set
        .candidates
        .par_iter()
        .map(|c| {
            let mut out = c.clone();
            let Some(pattern) = MatchPattern::from_model_token(&c.word) else {
                out.pmi = Score::NoEvidence;
                out.tfidf = Score::NoEvidence;
                return out;
            };
            out.tfidf = match tfidf(corpus, &pattern) {
                Ok(v) => Score::Value(v),
                Err(_) => Score::NoEvidence,
            };
            let hy = corpus.sentence_hits(&pattern);
            let label = pattern.to_string();
            let best = c
                .seeds()
                .into_iter()
                .filter_map(|s| seed_hits.get(s))
                .filter_map(|(xs, hx)| pmi_from_hits(n, hx, &hy, xs, &label).ok())
                .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))));
            out.pmi = match best {
                None => Score::NoEvidence,
                Some(v) if v == f64::NEG_INFINITY => Score::NegInfinity,
                Some(v) => Score::Value(v),
            };
            out
        })
        .collect();
    Ok(CandidateSet { candidates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Segmenter, Sentence};

    fn corpus_of(sentences: &[&str]) -> SentenceCorpus {
        let docs = sentences
            .iter()
            .enumerate()
            .map(|(i, s)| Document { id: i.to_string(), sentences: vec![Sentence::new(*s).unwrap()] })
            .collect();
        SentenceCorpus::from_documents(docs).unwrap()
    }

    fn p(s: &str) -> MatchPattern {
        MatchPattern::parse(s).unwrap()
    }

    #[test]
    fn pmi_hand_count() {
        let c = corpus_of(&["x y", "x y", "x", "y"]);
        let v = pmi(&c, &p("x"), &p("y")).unwrap();
        assert!((v - (8.0f64 / 9.0).ln()).abs() < 1e-12);
        assert!((v + 0.1178).abs() < 1e-4);
    }

    #[test]
    fn pmi_uninformative_y_is_zero() {
        let c = corpus_of(&["x y", "y", "y z"]);
        assert_eq!(pmi(&c, &p("x"), &p("y")).unwrap(), 0.0);
        assert_eq!(pmi(&c, &p("z"), &p("y")).unwrap(), 0.0);
    }

    #[test]
    fn pmi_errors_and_sentinel() {
        let c = corpus_of(&["x", "y"]);
        assert_eq!(pmi(&c, &p("x"), &p("y")).unwrap(), f64::NEG_INFINITY);
        match pmi(&c, &p("x"), &p("q")) {
            Err(ExpansionError::InsufficientEvidence(s)) => assert_eq!(s, "q"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn tfidf_hand_count() {
        let seg = Segmenter::default();
        let c = SentenceCorpus::from_texts(
            [
                ("d1", "w a b c d e f g h w"),
                ("d2", "a b c d e f g h i j"),
            ],
            &seg,
        )
        .unwrap();
        let v = tfidf(&c, &p("w")).unwrap();
        assert!((v - 0.1 * 2f64.ln()).abs() < 1e-12);
        assert!((v - 0.0693).abs() < 1e-4);
        assert_eq!(tfidf(&c, &p("a")).unwrap(), 0.0);
        assert!(matches!(tfidf(&c, &p("zzz")), Err(ExpansionError::WordAbsent(_))));
    }

    #[test]
    fn tfidf_permutation_invariant() {
        let seg = Segmenter::default();
        let a = SentenceCorpus::from_texts([("1", "w x"), ("2", "y z"), ("3", "w w q")], &seg).unwrap();
        let b = SentenceCorpus::from_texts([("3", "w w q"), ("1", "w x"), ("2", "y z")], &seg).unwrap();
        assert_eq!(tfidf(&a, &p("w")).unwrap(), tfidf(&b, &p("w")).unwrap());
    }

    #[test]
    fn distinct_dedupes() {
        let mk = |s: &str, c: &str| CandidatePair { seed: s.into(), candidate: c.into(), similarity: 0.5, model: "m".into() };
        let set = distinct_candidates(&[mk("s1", "a"), mk("s2", "a"), mk("s1", "b")]);
        assert_eq!(set.into_iter().collect::<Vec<_>>(), ["a", "b"]);
    }

    #[test]
    fn intersect_excludes_seeds() {
        let lex = SeedLexicon::from_surfaces(&["s"]).unwrap();
        let a: BTreeSet<String> = ["x", "y", "s"].map(String::from).into();
        let b: BTreeSet<String> = ["y", "z", "s"].map(String::from).into();
        assert_eq!(intersect(&a, &b, &lex).words(), ["y"]);
        let d: BTreeSet<String> = ["q"].map(String::from).into();
        assert!(intersect(&a, &d, &lex).is_empty());
    }

    #[test]
    fn empty_lexicon_expands_to_nothing() {
        let m = EmbeddingModel::from_rows("m", 1, vec!["a".into()], vec![1.0]).unwrap();
        let run = expand(&m, &SeedLexicon::default(), 5, true);
        assert!(run.pairs.is_empty() && run.skipped.is_empty());
    }

    #[test]
    fn oov_seeds_are_reported() {
        let m = EmbeddingModel::from_rows("m", 1, vec!["a".into(), "b".into()], vec![1.0, 0.5]).unwrap();
        let lex = SeedLexicon::from_surfaces(&["zzz", "a"]).unwrap();
        let run = expand(&m, &lex, 5, true);
        assert_eq!(run.skipped.len(), 1);
        assert_eq!(run.skipped[0].seed, "zzz");
        assert_eq!(run.pairs.len(), 1);
    }

    #[test]
    fn pairs_tsv_round_trip() {
        let pairs = vec![CandidatePair { seed: "s".into(), candidate: "c".into(), similarity: 0.5, model: "m".into() }];
        let mut buf = Vec::new();
        write_pairs_tsv(&pairs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "seed\tcandidate\tsimilarity\tmodel\ns\tc\t0.500000\tm\n");
        assert_eq!(read_pairs_tsv(&text).unwrap(), pairs);
    }

    #[test]
    fn score_retains_absent_candidates() {
        let lex = SeedLexicon::from_surfaces(&["x"]).unwrap();
        let mut set = intersect(
            &["ghost".to_string()].into(),
            &["ghost".to_string()].into(),
            &lex,
        );
        set.candidates[0].provenance.insert("m".into(), ModelEvidence { similarity: 0.4, seeds: vec!["x".into()] });
        let c = corpus_of(&["x y"]);
        let scored = score_candidates(&set, &c, &lex).unwrap();
        assert_eq!(scored.len(), 1);
        assert_eq!(scored.candidates[0].pmi, Score::NoEvidence);
        assert_eq!(scored.candidates[0].tfidf, Score::NoEvidence);
    }

    #[test]
    fn score_single_seed_equals_direct_pmi() {
        let lex = SeedLexicon::from_surfaces(&["x"]).unwrap();
        let mut set = intersect(&["y".to_string()].into(), &["y".to_string()].into(), &lex);
        set.candidates[0].provenance.insert("m".into(), ModelEvidence { similarity: 0.4, seeds: vec!["x".into()] });
        let c = corpus_of(&["x y", "x y", "x", "y"]);
        let scored = score_candidates(&set, &c, &lex).unwrap();
        assert_eq!(scored.candidates[0].pmi, Score::Value(pmi(&c, &p("x"), &p("y")).unwrap()));
    }

    #[test]
    fn score_json_round_trip() {
        let s = CandidateSet {
            candidates: vec![Candidate { pmi: Score::NegInfinity, tfidf: Score::Value(0.25), ..Candidate::unrated("w".into()) }],
        };
        assert_eq!(CandidateSet::from_json(&s.to_json()).unwrap(), s);
    }
}
