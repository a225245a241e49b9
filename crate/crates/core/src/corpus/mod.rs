//! Document ingestion, sentence segmentation and corpus-level analytics.

mod analytics;

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::{tokenize, MatchPattern};

pub use analytics::{
    find_sentences, ratio_table, relative_scores, split_corpus, uncertainty_rate, Balance,
    RateRow, Ratio, RatioRow, RelativeScore, SentenceMatch, SplitResult,
    CONSENSUS_FAILURE_CUES,
};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}, line {line}: {reason}")]
    BadRecord {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("duplicate document id {0:?}")]
    DuplicateDocument(String),
    #[error("duplicate group id {0:?}")]
    DuplicateGroup(String),
    #[error("at least one indicator pattern is required")]
    NoIndicators,
    #[error("{0} is empty")]
    EmptySplitSide(&'static str),
    #[error("baseline {0:?} has no document hits")]
    ZeroBaseline(String),
    #[error("group {0:?} has no items")]
    EmptyGroup(String),
    #[error("invalid pattern {0:?}")]
    BadPattern(String),
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CorpusError + '_ {
    move |source| CorpusError::Io { path: path.display().to_string(), source }
}

/// Parses each text into a pattern, failing on the first unusable one.
pub fn parse_patterns<S: AsRef<str>>(texts: &[S]) -> Result<Vec<MatchPattern>> {
    texts
        .iter()
        .map(|t| MatchPattern::parse(t.as_ref()).ok_or_else(|| CorpusError::BadPattern(t.as_ref().to_string())))
        .collect()
}

/// Rule-based sentence splitter.
///
/// Splits after `.`, `!` or `?` when followed by whitespace and an uppercase
/// letter, unless the text up to the mark ends with a known abbreviation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segmenter {
    abbreviations: Vec<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Self::with_abbreviations(
            ["e.g.", "i.e.", "et al.", "Fig.", "Figs.", "vs.", "cf.", "Dr.", "Eq.", "approx."]
                .iter()
                .map(|s| s.to_string()),
        )
    }
}

impl Segmenter {
    pub fn with_abbreviations(abbrevs: impl IntoIterator<Item = String>) -> Self {
        Self { abbreviations: abbrevs.into_iter().collect() }
    }

    fn guarded(&self, head: &str) -> bool {
        self.abbreviations.iter().any(|a| {
            head.ends_with(a.as_str())
                && head[..head.len() - a.len()]
                    .chars()
                    .next_back()
                    .is_none_or(|c| c.is_whitespace() || c == '(' || c == '[')
        })
    }

    pub fn segment(&self, text: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut start = 0usize;
        for (i, c) in text.char_indices() {
            if !matches!(c, '.' | '!' | '?') {
                continue;
            }
            let end = i + c.len_utf8();
            let rest = &text[end..];
            let after_ws = rest.trim_start();
            let has_ws = after_ws.len() < rest.len();
            let next_upper = after_ws.chars().next().is_some_and(char::is_uppercase);
            if has_ws && next_upper && !self.guarded(&text[start..end]) {
                let piece = text[start..end].trim();
                if !piece.is_empty() {
                    out.push(piece.to_string());
                }
                start = end;
            }
        }
        let tail = text[start..].trim();
        if !tail.is_empty() {
            out.push(tail.to_string());
        }
        out
    }
}

/// Splits `text` into sentences with the default abbreviation list.
pub fn segment(text: &str) -> Vec<String> {
    Segmenter::default().segment(text)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sentence {
    /// Original sentence text.
    pub text: String,
    /// Normalized lowercase tokens used for matching; never empty.
    pub tokens: Vec<String>,
}

impl Sentence {
    pub fn new(text: impl Into<String>) -> Option<Self> {
        let text = text.into();
        let tokens = tokenize(&text);
        (!tokens.is_empty()).then_some(Self { text, tokens })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub sentences: Vec<Sentence>,
}

/// Address of one sentence inside a [`SentenceCorpus`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SentenceRef {
    pub doc: usize,
    pub sentence: usize,
}

/// Documents of tokenized sentences with unique ids.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SentenceCorpus {
    documents: Vec<Document>,
    refs: Vec<SentenceRef>,
}

#[derive(Deserialize)]
struct JsonDoc {
    id: String,
    text: String,
}

impl SentenceCorpus {
    pub fn from_documents(documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut refs = Vec::new();
        for (d, doc) in documents.iter().enumerate() {
            if !seen.insert(doc.id.as_str()) {
                return Err(CorpusError::DuplicateDocument(doc.id.clone()));
            }
            refs.extend((0..doc.sentences.len()).map(|s| SentenceRef { doc: d, sentence: s }));
        }
        Ok(Self { documents, refs })
    }

    /// Segments and tokenizes `(id, text)` pairs. Sentences without tokens are dropped.
    pub fn from_texts<I, S, T>(texts: I, segmenter: &Segmenter) -> Result<Self>
    where
        I: IntoIterator<Item = (S, T)>,
        S: Into<String>,
        T: AsRef<str>,
    {
        let docs = texts
            .into_iter()
            .map(|(id, text)| Document {
                id: id.into(),
                sentences: segmenter
                    .segment(text.as_ref())
                    .into_iter()
                    .filter_map(Sentence::new)
                    .collect(),
            })
            .collect();
        Self::from_documents(docs)
    }

    /// Loads JSON lines (`{"id": ..., "text": ...}`) or a directory of `.txt` files.
    pub fn load(path: impl AsRef<Path>, segmenter: &Segmenter) -> Result<Self> {
        let path = path.as_ref();
        if path.is_dir() {
            Self::load_dir(path, segmenter)
        } else {
            Self::load_jsonl(path, segmenter)
        }
    }

    pub fn load_jsonl(path: &Path, segmenter: &Segmenter) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let mut docs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let doc: JsonDoc = serde_json::from_str(line).map_err(|e| CorpusError::BadRecord {
                path: path.display().to_string(),
                line: i + 1,
                reason: e.to_string(),
            })?;
            docs.push((doc.id, doc.text));
        }
        Self::from_texts(docs, segmenter)
    }

    /// Every `*.txt` file in `dir`, sorted by file name; the stem is the doc id.
    pub fn load_dir(dir: &Path, segmenter: &Segmenter) -> Result<Self> {
        let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
            .map_err(io_err(dir))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "txt"))
            .collect();
        files.sort();
        let mut docs = Vec::with_capacity(files.len());
        for f in files {
            let text = std::fs::read_to_string(&f).map_err(io_err(&f))?;
            let id = f.file_stem().unwrap_or_default().to_string_lossy().into_owned();
            docs.push((id, text));
        }
        Self::from_texts(docs, segmenter)
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    pub fn num_documents(&self) -> usize {
        self.documents.len()
    }

    pub fn num_sentences(&self) -> usize {
        self.refs.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.documents
            .iter()
            .flat_map(|d| &d.sentences)
            .map(|s| s.tokens.len())
            .sum()
    }

    pub fn is_empty(&self) -> bool {
        self.refs.is_empty()
    }

    /// All sentence references in corpus order.
    pub fn refs(&self) -> &[SentenceRef] {
        &self.refs
    }

    pub fn sentence(&self, r: SentenceRef) -> &Sentence {
        &self.documents[r.doc].sentences[r.sentence]
    }

    pub fn doc_id(&self, r: SentenceRef) -> &str {
        &self.documents[r.doc].id
    }

    /// Flat indices (into [`refs`](Self::refs)) of sentences matching `pattern`.
    pub fn sentence_hits(&self, pattern: &MatchPattern) -> Vec<u32> {
        self.refs
            .iter()
            .enumerate()
            .filter(|(_, &r)| pattern.matches(&self.sentence(r).tokens))
            .map(|(i, _)| i as u32)
            .collect()
    }
}

/// One item of a [`DocumentCollection`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollectionItem {
    pub doc_id: String,
    pub sentences: Vec<Vec<String>>,
}

impl CollectionItem {
    pub fn from_text(doc_id: impl Into<String>, text: &str) -> Self {
        Self {
            doc_id: doc_id.into(),
            sentences: segment(text).iter().map(|s| tokenize(s)).filter(|t| !t.is_empty()).collect(),
        }
    }

    pub fn matches(&self, pattern: &MatchPattern) -> bool {
        self.sentences.iter().any(|s| pattern.matches(s))
    }
}

/// A named group of items, e.g. the records of one subject area.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocumentCollection {
    pub group_id: String,
    pub items: Vec<CollectionItem>,
}

impl DocumentCollection {
    pub fn from_corpus(group_id: impl Into<String>, corpus: &SentenceCorpus) -> Self {
        Self {
            group_id: group_id.into(),
            items: corpus
                .documents()
                .iter()
                .map(|d| CollectionItem {
                    doc_id: d.id.clone(),
                    sentences: d.sentences.iter().map(|s| s.tokens.clone()).collect(),
                })
                .collect(),
        }
    }

    /// Reads a JSON manifest `{"group": "path/to/corpus", ...}`; relative
    /// paths resolve against the manifest's directory.
    pub fn load_manifest(path: &Path, segmenter: &Segmenter) -> Result<Vec<Self>> {
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let map: BTreeMap<String, String> =
            serde_json::from_str(&text).map_err(|e| CorpusError::BadRecord {
                path: path.display().to_string(),
                line: e.line(),
                reason: e.to_string(),
            })?;
        let base = path.parent().unwrap_or(Path::new("."));
        map.into_iter()
            .map(|(group, p)| {
                let corpus = SentenceCorpus::load(base.join(p), segmenter)?;
                Ok(Self::from_corpus(group, &corpus))
            })
            .collect()
    }

    pub fn hits(&self, pattern: &MatchPattern) -> usize {
        self.items.iter().filter(|i| i.matches(pattern)).count()
    }
}
