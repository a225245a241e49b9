//! Feature construction and labelled dataset assembly.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ClassifyError, Label, Result};
use crate::embedding::EmbeddingModel;
use crate::lexicon::SeedLexicon;
use crate::scalar::Scalar;

/// Default seed for the dataset shuffle.
pub const DATASET_SHUFFLE_SEED: u64 = 0x5eed;

/// Draws `n` vocabulary tokens whose maximum cosine to every seed model form
/// is below `max_sim`.
///
/// Candidates are visited in a seeded random order; tokens that are seeds,
/// listed in `exclude` (compared lowercase), unusable, or a case variant of
/// an already drawn token are skipped. Seeds absent from the model do not
/// constrain the draw.
pub fn sample_unrelated(
    model: &EmbeddingModel,
    lexicon: &SeedLexicon,
    exclude: &HashSet<String>,
    n: usize,
    max_sim: f32,
    rng_seed: u64,
) -> Result<Vec<String>> {
    let seed_terms = lexicon.folded_terms();
    let seed_idx: Vec<usize> = lexicon
        .entries()
        .iter()
        .flat_map(|e| e.model_forms.iter())
        .filter_map(|f| model.resolve(f, true).ok())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut order: Vec<usize> = (0..model.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(rng_seed));
    let mut taken = HashSet::new();
    let mut out = Vec::with_capacity(n);
    for idx in order {
        if out.len() == n {
            break;
        }
        if !model.is_usable(idx) {
            continue;
        }
        let tok = model.token(idx);
        let key = tok.to_lowercase();
        if seed_terms.contains(&key) || exclude.contains(&key) || taken.contains(&key) {
            continue;
        }
        if seed_idx.iter().any(|&s| model.cosine_idx(idx, s) >= max_sim) {
            continue;
        }
        taken.insert(key);
        out.push(tok.to_string());
    }
    if out.len() < n {
        return Err(ClassifyError::NotEnoughUnrelated { found: out.len(), requested: n });
    }
    Ok(out)
}

/// Concatenated raw vectors of one word across models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Features<T> {
    pub values: Vec<T>,
    /// One flag per model; `true` where the segment was zero-filled.
    pub oov: Vec<bool>,
}

/// Looks `word` up in every model (spaces become `_`, case folded) and
/// concatenates the raw vectors. Missing segments are zero-filled; a word
/// missing from every model is an error.
pub fn featurize<T: Scalar>(word: &str, models: &[&EmbeddingModel]) -> Result<Features<T>> {
    let token = word.trim().replace(' ', "_");
    let total: usize = models.iter().map(|m| m.dim()).sum();
    let mut values = Vec::with_capacity(total);
    let mut oov = Vec::with_capacity(models.len());
    for m in models {
        match m.resolve(&token, true) {
            Ok(idx) => {
                values.extend(m.vector(idx).iter().map(|&x| T::of(x as f64)));
                oov.push(false);
            }
            Err(_) => {
                values.extend(std::iter::repeat_n(T::zero(), m.dim()));
                oov.push(true);
            }
        }
    }
    if oov.iter().all(|&o| o) {
        return Err(ClassifyError::AllModelsOov(word.to_string()));
    }
    Ok(Features { values, oov })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledExample<T> {
    pub word: String,
    pub label: Label,
    pub features: Features<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset<T> {
    pub examples: Vec<LabeledExample<T>>,
    pub dim: usize,
    /// Words dropped because no model contained them.
    pub excluded: Vec<String>,
}

impl<T: Scalar> Dataset<T> {
    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.examples.iter().map(|e| e.label).collect()
    }

    pub fn num_pos(&self) -> usize {
        self.examples.iter().filter(|e| e.label.is_pos()).count()
    }
}

#[derive(Debug, Clone, Default)]
pub struct DatasetInputs<'a> {
    pub accepted: Vec<String>,
    pub rejected: Vec<String>,
    pub unrelated: Vec<String>,
    /// When set, every seed model form is added as a positive example.
    pub seeds: Option<&'a SeedLexicon>,
}

/// Positives are accepted words (plus seeds when requested), negatives are
/// rejected and unrelated words. The three lists must be disjoint.
pub fn build_dataset<T: Scalar>(
    inputs: &DatasetInputs<'_>,
    models: &[&EmbeddingModel],
    shuffle_seed: u64,
) -> Result<Dataset<T>> {
    let mut owner: std::collections::HashMap<String, usize> = Default::default();
    for (list_no, list) in [&inputs.accepted, &inputs.rejected, &inputs.unrelated].into_iter().enumerate() {
        for w in list {
            let key = w.to_lowercase();
            match owner.get(&key) {
                Some(&o) if o != list_no => return Err(ClassifyError::OverlappingLists(w.clone())),
                _ => {
                    owner.insert(key, list_no);
                }
            }
        }
    }

    let mut labelled: Vec<(String, Label)> = Vec::new();
    let mut seen = HashSet::new();
    let mut push = |w: &str, label: Label, labelled: &mut Vec<(String, Label)>| {
        if seen.insert(w.to_lowercase()) {
            labelled.push((w.to_string(), label));
        }
    };
    for w in &inputs.accepted {
        push(w, Label::Pos, &mut labelled);
    }
    if let Some(lex) = inputs.seeds {
        for form in lex.entries().iter().flat_map(|e| e.model_forms.iter()) {
            if owner.get(&form.to_lowercase()).is_some_and(|&o| o != 0) {
                return Err(ClassifyError::OverlappingLists(form.clone()));
            }
            push(form, Label::Pos, &mut labelled);
        }
    }
    for w in inputs.rejected.iter().chain(&inputs.unrelated) {
        push(w, Label::Neg, &mut labelled);
    }

    let mut examples = Vec::with_capacity(labelled.len());
    let mut excluded = Vec::new();
    for (word, label) in labelled {
        match featurize(&word, models) {
            Ok(features) => examples.push(LabeledExample { word, label, features }),
            Err(ClassifyError::AllModelsOov(w)) => {
                log::warn!("{w:?} is absent from every model; excluded");
                excluded.push(w);
            }
            Err(e) => return Err(e),
        }
    }
    let pos = examples.iter().filter(|e| e.label.is_pos()).count();
    if pos == 0 || pos == examples.len() {
        return Err(ClassifyError::DegenerateDataset(format!(
            "{pos} positive and {} negative examples",
            examples.len() - pos
        )));
    }
    examples.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
    let dim = models.iter().map(|m| m.dim()).sum();
    Ok(Dataset { examples, dim, excluded })
}
