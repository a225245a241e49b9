//! Cue-word patterns matched against tokenized sentences.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    Literal,
    PrefixWildcard,
    Phrase,
}

/// A literal token, a prefix wildcard (`surpris*`) or a multi-token phrase.
///
/// Pattern tokens are normalized the same way as corpus tokens, so matching
/// is plain string comparison on lowercase tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MatchPattern {
    kind: MatchKind,
    tokens: Vec<String>,
}

/// Lowercases a raw token and strips leading and trailing non-alphanumerics.
/// Inner punctuation such as hyphens is kept.
pub fn normalize_token(raw: &str) -> String {
    raw.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase()
}

/// Whitespace tokenization followed by [`normalize_token`]; empty tokens are dropped.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(normalize_token)
        .filter(|t| !t.is_empty())
        .collect()
}

impl MatchPattern {
    /// Parses `"word"`, `"stem*"` or `"two words"`. Returns `None` when nothing
    /// matchable remains after normalization.
    pub fn parse(text: &str) -> Option<Self> {
        let text = text.trim();
        let words: Vec<&str> = text.split_whitespace().collect();
        if words.len() == 1 && text.ends_with('*') {
            let stem = normalize_token(text.trim_end_matches('*'));
            if stem.is_empty() {
                return None;
            }
            return Some(Self { kind: MatchKind::PrefixWildcard, tokens: vec![stem] });
        }
        let tokens = tokenize(text);
        match tokens.len() {
            0 => None,
            1 => Some(Self { kind: MatchKind::Literal, tokens }),
            _ => Some(Self { kind: MatchKind::Phrase, tokens }),
        }
    }

    /// Pattern for an embedding-model token, where `_` joins phrase words.
    pub fn from_model_token(token: &str) -> Option<Self> {
        Self::parse(&token.replace('_', " "))
    }

    pub fn literal(word: &str) -> Option<Self> {
        let t = normalize_token(word);
        (!t.is_empty()).then(|| Self { kind: MatchKind::Literal, tokens: vec![t] })
    }

    pub fn kind(&self) -> MatchKind {
        self.kind
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// True when the pattern occurs at least once in `sentence`.
    pub fn matches<S: AsRef<str>>(&self, sentence: &[S]) -> bool {
        match self.kind {
            MatchKind::Literal => sentence.iter().any(|t| t.as_ref() == self.tokens[0]),
            MatchKind::PrefixWildcard => {
                sentence.iter().any(|t| t.as_ref().starts_with(self.tokens[0].as_str()))
            }
            MatchKind::Phrase => self.phrase_positions(sentence).next().is_some(),
        }
    }

    /// Number of occurrences in `sentence` (phrase occurrences may overlap).
    pub fn count<S: AsRef<str>>(&self, sentence: &[S]) -> usize {
        match self.kind {
            MatchKind::Literal => sentence.iter().filter(|t| t.as_ref() == self.tokens[0]).count(),
            MatchKind::PrefixWildcard => sentence
                .iter()
                .filter(|t| t.as_ref().starts_with(self.tokens[0].as_str()))
                .count(),
            MatchKind::Phrase => self.phrase_positions(sentence).count(),
        }
    }

    fn phrase_positions<'a, S: AsRef<str>>(
        &'a self,
        sentence: &'a [S],
    ) -> impl Iterator<Item = usize> + 'a {
        let n = self.tokens.len();
        (0..(sentence.len() + 1).saturating_sub(n)).filter(move |&start| {
            sentence[start..start + n]
                .iter()
                .zip(&self.tokens)
                .all(|(a, b)| a.as_ref() == b)
        })
    }
}

impl fmt::Display for MatchPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            MatchKind::PrefixWildcard => write!(f, "{}*", self.tokens[0]),
            _ => f.write_str(&self.tokens.join(" ")),
        }
    }
}
