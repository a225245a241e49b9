//! Seed lexicon: the hand-built list of cue words the expansion starts from.

use std::collections::{BTreeSet, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::pattern::{MatchKind, MatchPattern};

const BUNDLED: &str = include_str!("../data/seeds.txt");

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("lexicon {0} contains no entries")]
    Empty(String),
    #[error("line {line}: duplicate seed {surface:?}")]
    Duplicate { line: usize, surface: String },
    #[error("line {line}: wildcard seed {surface:?} needs explicit model forms")]
    WildcardWithoutForms { line: usize, surface: String },
    #[error("line {line}: unknown source tag {tag:?}")]
    UnknownTag { line: usize, tag: String },
    #[error("line {line}: nothing matchable in {surface:?}")]
    Unmatchable { line: usize, surface: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceTag {
    Hedging,
    Scientific,
    Custom,
}

impl std::str::FromStr for SourceTag {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        match s.trim().to_ascii_lowercase().as_str() {
            "hedging" => Ok(Self::Hedging),
            "scientific" => Ok(Self::Scientific),
            "custom" => Ok(Self::Custom),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub surface: String,
    pub match_kind: MatchKind,
    /// Tokens looked up in embedding models. Phrases use `_` between words.
    pub model_forms: Vec<String>,
    pub source_tag: SourceTag,
}

impl SeedEntry {
    pub fn pattern(&self) -> MatchPattern {
        MatchPattern::parse(&self.surface).expect("validated at construction")
    }
}

/// Ordered list of seed entries with case-insensitively unique surfaces.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SeedLexicon {
    entries: Vec<SeedEntry>,
}

impl SeedLexicon {
    /// The default lexicon shipped with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED, "<bundled>").expect("bundled lexicon is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LexiconError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Parses the line format `surface [TAB tag [TAB form,form,...]]`.
    /// `#` starts a comment; blank lines are ignored.
    pub fn parse(text: &str, origin: &str) -> Result<Self, LexiconError> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let surface = cols.next().unwrap_or("").trim().to_string();
            let tag = match cols.next().map(str::trim).filter(|s| !s.is_empty()) {
                None => SourceTag::Custom,
                Some(t) => t.parse().map_err(|_| LexiconError::UnknownTag {
                    line: line_no,
                    tag: t.to_string(),
                })?,
            };
            let forms: Vec<String> = cols
                .next()
                .map(|f| {
                    f.split(',')
                        .map(|s| s.trim().replace(' ', "_"))
                        .filter(|s| !s.is_empty())
                        .collect()
                })
                .unwrap_or_default();
            let entry = Self::make_entry(surface, tag, forms, line_no)?;
            if !seen.insert(entry.surface.to_lowercase()) {
                return Err(LexiconError::Duplicate { line: line_no, surface: entry.surface });
            }
            entries.push(entry);
        }
        if entries.is_empty() {
            return Err(LexiconError::Empty(origin.to_string()));
        }
        Ok(Self { entries })
    }

    fn make_entry(
        surface: String,
        source_tag: SourceTag,
        forms: Vec<String>,
        line: usize,
    ) -> Result<SeedEntry, LexiconError> {
        let pattern = MatchPattern::parse(&surface).ok_or_else(|| LexiconError::Unmatchable {
            line,
            surface: surface.clone(),
        })?;
        let match_kind = pattern.kind();
        let model_forms = if !forms.is_empty() {
            forms
        } else {
            match match_kind {
                MatchKind::PrefixWildcard => {
                    return Err(LexiconError::WildcardWithoutForms { line, surface })
                }
                MatchKind::Literal => vec![surface.clone()],
                MatchKind::Phrase => vec![surface.split_whitespace().collect::<Vec<_>>().join("_")],
            }
        };
        Ok(SeedEntry { surface, match_kind, model_forms, source_tag })
    }

    /// Builds a lexicon from bare surfaces (all tagged `custom`).
    pub fn from_surfaces<S: AsRef<str>>(surfaces: &[S]) -> Result<Self, LexiconError> {
        let text: Vec<&str> = surfaces.iter().map(AsRef::as_ref).collect();
        Self::parse(&text.join("\n"), "<inline>")
    }

    pub fn entries(&self) -> &[SeedEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, surface: &str) -> Option<&SeedEntry> {
        let key = surface.to_lowercase();
        self.entries.iter().find(|e| e.surface.to_lowercase() == key)
    }

    /// Lowercased surfaces and model forms; candidates equal to any of these
    /// are seeds, not expansions.
    pub fn folded_terms(&self) -> BTreeSet<String> {
        self.entries
            .iter()
            .flat_map(|e| {
                std::iter::once(e.surface.to_lowercase())
                    .chain(std::iter::once(e.surface.to_lowercase().replace(' ', "_")))
                    .chain(e.model_forms.iter().map(|f| f.to_lowercase()))
            })
            .collect()
    }

    /// Lowercased seed surfaces.
    pub fn folded_surfaces(&self) -> BTreeSet<String> {
        self.entries.iter().map(|e| e.surface.to_lowercase()).collect()
    }
}
