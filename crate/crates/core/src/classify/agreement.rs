//! Two-judge agreement: percent agreement, Cohen's kappa, Landis-Koch band.

use std::collections::{HashMap, HashSet};
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::{ClassifyError, Label, Result};
use crate::expansion::Status;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub word: String,
    pub judge1: Label,
    pub judge2: Label,
}

/// Reads CSV with `word`, `judge1` and `judge2` columns holding `pos`/`neg`.
/// Other columns are ignored and lines starting with `#` are comments.
pub fn read_annotations<R: Read>(reader: R) -> Result<Vec<Annotation>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).flexible(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| ClassifyError::BadAnnotation {
            line: 1,
            reason: format!("missing column {name:?}"),
        })
    };
    let (cw, c1, c2) = (column("word")?, column("judge1")?, column("judge2")?);
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |reason: String| ClassifyError::BadAnnotation { line, reason };
        let field = |i: usize| rec.get(i).ok_or_else(|| bad(format!("expected at least {} fields", i + 1)));
        let word = field(cw)?.to_string();
        if word.is_empty() {
            return Err(bad("empty word".into()));
        }
        let judge1 = field(c1)?.parse().map_err(bad)?;
        let judge2 = field(c2)?.parse().map_err(bad)?;
        if !seen.insert(word.clone()) {
            return Err(ClassifyError::DuplicateWord(word));
        }
        out.push(Annotation { word, judge1, judge2 });
    }
    Ok(out)
}

/// Consensus status per word: accepted when both judges say `pos`,
/// rejected otherwise.
pub fn consensus_statuses(annotations: &[Annotation]) -> HashMap<String, Status> {
    annotations
        .iter()
        .map(|a| {
            let s = if a.judge1.is_pos() && a.judge2.is_pos() { Status::Accepted } else { Status::Rejected };
            (a.word.to_lowercase(), s)
        })
        .collect()
}

/// 2×2 contingency counts; the first letter is judge 1, the second judge 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementCounts {
    pub pp: u64,
    pub pn: u64,
    pub np: u64,
    pub nn: u64,
}

impl AgreementCounts {
    pub fn from_annotations(annotations: &[Annotation]) -> Self {
        let mut c = Self { pp: 0, pn: 0, np: 0, nn: 0 };
        for a in annotations {
            match (a.judge1, a.judge2) {
                (Label::Pos, Label::Pos) => c.pp += 1,
                (Label::Pos, Label::Neg) => c.pn += 1,
                (Label::Neg, Label::Pos) => c.np += 1,
                (Label::Neg, Label::Neg) => c.nn += 1,
            }
        }
        c
    }

    pub fn total(&self) -> u64 {
        self.pp + self.pn + self.np + self.nn
    }

    /// The same table with the judges swapped.
    pub fn transposed(&self) -> Self {
        Self { pp: self.pp, pn: self.np, np: self.pn, nn: self.nn }
    }

    pub fn report(&self) -> Result<AgreementReport> {
        let n = self.total();
        if n < 2 {
            return Err(ClassifyError::TooFewAnnotations(n as usize));
        }
        let nf = n as f64;
        let observed = (self.pp + self.nn) as f64 / nf;
        let j1_pos = (self.pp + self.pn) as f64;
        let j2_pos = (self.pp + self.np) as f64;
        let expected = (j1_pos * j2_pos + (nf - j1_pos) * (nf - j2_pos)) / (nf * nf);
        if expected >= 1.0 {
            return Err(ClassifyError::KappaUndefined);
        }
        let kappa = (observed - expected) / (1.0 - expected);
        Ok(AgreementReport {
            counts: *self,
            percent_agreement: observed,
            expected_agreement: expected,
            kappa,
            band: LandisKoch::of(kappa),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LandisKoch {
    Poor,
    Slight,
    Fair,
    Moderate,
    Substantial,
    AlmostPerfect,
}

impl LandisKoch {
    pub fn of(kappa: f64) -> Self {
        match kappa {
            k if k <= 0.0 => Self::Poor,
            k if k <= 0.2 => Self::Slight,
            k if k <= 0.4 => Self::Fair,
            k if k <= 0.6 => Self::Moderate,
            k if k <= 0.8 => Self::Substantial,
            _ => Self::AlmostPerfect,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Poor => "poor",
            Self::Slight => "slight",
            Self::Fair => "fair",
            Self::Moderate => "moderate",
            Self::Substantial => "substantial",
            Self::AlmostPerfect => "almost perfect",
        }
    }
}

impl std::fmt::Display for LandisKoch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub counts: AgreementCounts,
    pub percent_agreement: f64,
    pub expected_agreement: f64,
    pub kappa: f64,
    pub band: LandisKoch,
}

pub fn agreement(annotations: &[Annotation]) -> Result<AgreementReport> {
    AgreementCounts::from_annotations(annotations).report()
}
