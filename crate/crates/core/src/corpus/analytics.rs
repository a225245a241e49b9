//! Counting analytics over ingested corpora: S+/S- splits, cue ratios,
//! baseline-relative scores, per-group rates and sentence retrieval.

use std::cmp::Ordering;
use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use super::{CorpusError, DocumentCollection, Result, SentenceCorpus, SentenceRef};
use crate::pattern::MatchPattern;

/// Default consensus-failure query, also the default S+ indicator list.
pub const CONSENSUS_FAILURE_CUES: [&str; 5] =
    ["conflicting", "contradictory", "inconsistent", "discrepant", "irreconcilable"];

/// Size balancing applied after splitting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Balance {
    #[default]
    None,
    /// Down-sample the larger side to the size of the smaller one.
    Equalize { rng_seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitResult {
    pub s_plus: Vec<SentenceRef>,
    pub s_minus: Vec<SentenceRef>,
    pub indicators: Vec<String>,
    pub balanced: bool,
}

/// Partitions sentences into those matching at least one indicator (S+)
/// and those matching none (S-).
pub fn split_corpus(
    corpus: &SentenceCorpus,
    indicators: &[MatchPattern],
    balance: Balance,
) -> Result<SplitResult> {
    if indicators.is_empty() {
        return Err(CorpusError::NoIndicators);
    }
    let (mut s_plus, mut s_minus): (Vec<SentenceRef>, Vec<SentenceRef>) = corpus
        .refs()
        .iter()
        .partition(|&&r| indicators.iter().any(|p| p.matches(&corpus.sentence(r).tokens)));
    let balanced = if let Balance::Equalize { rng_seed } = balance {
        let target = s_plus.len().min(s_minus.len());
        let larger = if s_plus.len() > target { &mut s_plus } else { &mut s_minus };
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        larger.shuffle(&mut rng);
        larger.truncate(target);
        larger.sort();
        true
    } else {
        false
    };
    Ok(SplitResult {
        s_plus,
        s_minus,
        indicators: indicators.iter().map(ToString::to_string).collect(),
        balanced,
    })
}

/// S+/S- rate ratio; infinite when the word never occurs in S-.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
pub enum Ratio {
    Finite(f64),
    Infinite,
}

impl Ratio {
    pub fn value(self) -> f64 {
        match self {
            Ratio::Finite(x) => x,
            Ratio::Infinite => f64::INFINITY,
        }
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ratio::Finite(x) => write!(f, "{x:.3}"),
            Ratio::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for Ratio {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Ratio::Finite(x) => s.serialize_f64(*x),
            Ratio::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub word: String,
    pub n_plus: usize,
    pub pct_plus: f64,
    pub n_minus: usize,
    pub pct_minus: f64,
    pub ratio: Ratio,
}

impl RatioRow {
    /// Row from raw counts; both set sizes must be positive.
    pub fn from_counts(
        word: impl Into<String>,
        n_plus: usize,
        size_plus: usize,
        n_minus: usize,
        size_minus: usize,
    ) -> Result<Self> {
        if size_plus == 0 {
            return Err(CorpusError::EmptySplitSide("S+"));
        }
        if size_minus == 0 {
            return Err(CorpusError::EmptySplitSide("S-"));
        }
        let rate_plus = n_plus as f64 / size_plus as f64;
        let rate_minus = n_minus as f64 / size_minus as f64;
        let ratio = if n_minus == 0 { Ratio::Infinite } else { Ratio::Finite(rate_plus / rate_minus) };
        Ok(Self {
            word: word.into(),
            n_plus,
            pct_plus: 100.0 * rate_plus,
            n_minus,
            pct_minus: 100.0 * rate_minus,
            ratio,
        })
    }
}

fn ratio_order(a: &RatioRow, b: &RatioRow) -> Ordering {
    match (a.ratio, b.ratio) {
        (Ratio::Infinite, Ratio::Infinite) => Ordering::Equal,
        (Ratio::Infinite, _) => Ordering::Less,
        (_, Ratio::Infinite) => Ordering::Greater,
        (Ratio::Finite(x), Ratio::Finite(y)) => y.total_cmp(&x),
    }
    .then_with(|| a.word.cmp(&b.word))
}

/// Per-word sentence counts in S+ and S-, sorted by ratio descending.
pub fn ratio_table(
    corpus: &SentenceCorpus,
    words: &[MatchPattern],
    split: &SplitResult,
) -> Result<Vec<RatioRow>> {
    let count = |set: &[SentenceRef], p: &MatchPattern| {
        set.iter().filter(|&&r| p.matches(&corpus.sentence(r).tokens)).count()
    };
    let mut rows = words
        .iter()
        .map(|w| {
            RatioRow::from_counts(
                w.to_string(),
                count(&split.s_plus, w),
                split.s_plus.len(),
                count(&split.s_minus, w),
                split.s_minus.len(),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(ratio_order);
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeScore {
    pub word: String,
    pub hits: usize,
    pub baseline_hits: usize,
    pub score: f64,
}

/// Document-hit count of each word divided by that of the baseline word.
pub fn relative_scores(
    collection: &DocumentCollection,
    words: &[MatchPattern],
    baseline: &MatchPattern,
) -> Result<Vec<RelativeScore>> {
    let baseline_hits = collection.hits(baseline);
    if baseline_hits == 0 {
        return Err(CorpusError::ZeroBaseline(baseline.to_string()));
    }
    Ok(words
        .iter()
        .map(|w| {
            let hits = collection.hits(w);
            RelativeScore {
                word: w.to_string(),
                hits,
                baseline_hits,
                score: hits as f64 / baseline_hits as f64,
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub group: String,
    pub matched: usize,
    pub total: usize,
    pub rate: f64,
}

impl RateRow {
    pub fn new(group: impl Into<String>, matched: usize, total: usize) -> Result<Self> {
        let group = group.into();
        if total == 0 {
            return Err(CorpusError::EmptyGroup(group));
        }
        Ok(Self { rate: matched as f64 / total as f64, group, matched, total })
    }

    /// Rate as a whole-number percentage, rounded half away from zero.
    pub fn percent_rounded(&self) -> u32 {
        (100.0 * self.rate).round() as u32
    }
}

/// Fraction of items per group matching at least one query pattern,
/// sorted by rate descending.
pub fn uncertainty_rate(
    groups: &[DocumentCollection],
    query: &[MatchPattern],
) -> Result<Vec<RateRow>> {
    let mut seen = HashMap::new();
    let mut rows = Vec::with_capacity(groups.len());
    for g in groups {
        if seen.insert(g.group_id.as_str(), ()).is_some() {
            return Err(CorpusError::DuplicateGroup(g.group_id.clone()));
        }
        let matched = g
            .items
            .iter()
            .filter(|item| query.iter().any(|p| item.matches(p)))
            .count();
        rows.push(RateRow::new(g.group_id.clone(), matched, g.items.len())?);
    }
    rows.sort_by(|a, b| b.rate.total_cmp(&a.rate).then_with(|| a.group.cmp(&b.group)));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceMatch {
    pub doc_id: String,
    pub sentence_index: usize,
    pub sentence: String,
    pub cues: Vec<String>,
}

/// Sentences containing any cue, ordered by (doc id, sentence index).
///
/// Each cue contributes at most `limit` sentences; a returned sentence lists
/// every cue it matches.
pub fn find_sentences(
    corpus: &SentenceCorpus,
    cues: &[MatchPattern],
    limit: usize,
) -> Vec<SentenceMatch> {
    let mut refs: Vec<SentenceRef> = corpus.refs().to_vec();
    refs.sort_by(|a, b| {
        corpus
            .doc_id(*a)
            .cmp(corpus.doc_id(*b))
            .then(a.sentence.cmp(&b.sentence))
    });
    let mut used = vec![0usize; cues.len()];
    let mut out = Vec::new();
    for r in refs {
        let sentence = corpus.sentence(r);
        let matched: Vec<usize> =
            (0..cues.len()).filter(|&c| cues[c].matches(&sentence.tokens)).collect();
        let quota: Vec<usize> = matched.iter().copied().filter(|&c| used[c] < limit).collect();
        if quota.is_empty() {
            continue;
        }
        for &c in &quota {
            used[c] += 1;
        }
        out.push(SentenceMatch {
            doc_id: corpus.doc_id(r).to_string(),
            sentence_index: r.sentence,
            sentence: sentence.text.clone(),
            cues: matched.iter().map(|&c| cues[c].to_string()).collect(),
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{CollectionItem, Segmenter};

    fn corpus(texts: &[(&str, &str)]) -> SentenceCorpus {
        SentenceCorpus::from_texts(texts.iter().copied(), &Segmenter::default()).unwrap()
    }

    fn pats(words: &[&str]) -> Vec<MatchPattern> {
        crate::corpus::parse_patterns(words).unwrap()
    }

    #[test]
    fn split_toy() {
        let c = corpus(&[("1", "Results were conflicting. Data are clear. All good.")]);
        let s = split_corpus(&c, &pats(&["conflicting"]), Balance::None).unwrap();
        assert_eq!((s.s_plus.len(), s.s_minus.len()), (1, 2));
    }

    #[test]
    fn split_vacuous() {
        let c = corpus(&[("1", "Nothing here. Nor here.")]);
        let s = split_corpus(&c, &pats(&["conflicting"]), Balance::None).unwrap();
        assert!(s.s_plus.is_empty());
        assert_eq!(s.s_minus.len(), 2);
    }

    #[test]
    fn split_requires_indicators() {
        let c = corpus(&[("1", "x")]);
        assert!(matches!(split_corpus(&c, &[], Balance::None), Err(CorpusError::NoIndicators)));
    }

    #[test]
    fn balancing_equalizes_deterministically() {
        let c = corpus(&[("1", "A conflicting one. B. C. D. E conflicting.")]);
        let p = pats(&["conflicting"]);
        let a = split_corpus(&c, &p, Balance::Equalize { rng_seed: 3 }).unwrap();
        let b = split_corpus(&c, &p, Balance::Equalize { rng_seed: 3 }).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.s_plus.len(), 2);
        assert_eq!(a.s_minus.len(), 2);
    }

    #[test]
    fn ratio_from_counts() {
        let r = RatioRow::from_counts("inconclusive", 169, 35_572, 4, 35_527).unwrap();
        assert!((r.ratio.value() - 42.197).abs() < 0.01);
        let eq = RatioRow::from_counts("w", 5, 100, 10, 200).unwrap();
        assert_eq!(eq.ratio, Ratio::Finite(1.0));
        let inf = RatioRow::from_counts("w", 5, 100, 0, 200).unwrap();
        assert_eq!(inf.ratio, Ratio::Infinite);
        assert!(RatioRow::from_counts("w", 0, 0, 0, 1).is_err());
    }

    #[test]
    fn infinite_ratios_sort_first() {
        let mut rows = [
            RatioRow::from_counts("a", 5, 10, 1, 10).unwrap(),
            RatioRow::from_counts("b", 1, 10, 0, 10).unwrap(),
            RatioRow::from_counts("c", 9, 10, 1, 10).unwrap(),
        ];
        rows.sort_by(ratio_order);
        let order: Vec<_> = rows.iter().map(|r| r.word.as_str()).collect();
        assert_eq!(order, ["b", "c", "a"]);
    }

    #[test]
    fn relative_scores_hand_count() {
        let mut items = Vec::new();
        for i in 0..4 {
            items.push(CollectionItem::from_text(format!("k{i}"), "Our knowledge grows."));
        }
        for i in 0..3 {
            items.push(CollectionItem::from_text(format!("u{i}"), "The cause is unknown."));
        }
        let coll = DocumentCollection { group_id: "g".into(), items };
        let base = MatchPattern::parse("knowledge").unwrap();
        let s = relative_scores(&coll, &pats(&["unknown", "knowledge"]), &base).unwrap();
        assert_eq!(s[0].score, 0.75);
        assert_eq!(s[1].score, 1.0);
        let missing = MatchPattern::parse("absent").unwrap();
        assert!(matches!(relative_scores(&coll, &[], &missing), Err(CorpusError::ZeroBaseline(_))));
    }

    #[test]
    fn rate_rows() {
        let r = RateRow::new("Psychology", 70_096, 220_250).unwrap();
        assert_eq!(r.percent_rounded(), 32);
        assert!(matches!(RateRow::new("x", 0, 0), Err(CorpusError::EmptyGroup(_))));
    }

    #[test]
    fn rate_zero_matches() {
        let g = DocumentCollection {
            group_id: "g".into(),
            items: vec![CollectionItem::from_text("1", "Nothing.")],
        };
        let rows = uncertainty_rate(&[g], &pats(&CONSENSUS_FAILURE_CUES)).unwrap();
        assert_eq!(rows[0].rate, 0.0);
    }

    #[test]
    fn find_orders_by_doc_and_limits_per_cue() {
        let c = corpus(&[
            ("b", "Unproven claim one. Another unproven claim."),
            ("a", "This is unproven. Fine."),
        ]);
        let all = find_sentences(&c, &pats(&["unproven"]), 10);
        let keys: Vec<_> = all.iter().map(|m| (m.doc_id.as_str(), m.sentence_index)).collect();
        assert_eq!(keys, [("a", 0), ("b", 0), ("b", 1)]);
        assert_eq!(find_sentences(&c, &pats(&["unproven"]), 1).len(), 1);
        assert!(find_sentences(&c, &pats(&["absent"]), 5).is_empty());
    }
}
