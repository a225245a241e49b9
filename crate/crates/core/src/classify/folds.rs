//! Stratified k-fold assignment.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{ClassifyError, Label, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    pub k: usize,
    /// Fold number of each example, in dataset order.
    pub fold_of: Vec<usize>,
}

impl FoldAssignment {
    pub fn len(&self) -> usize {
        self.fold_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fold_of.is_empty()
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.fold_of[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.fold_of[i] != fold).collect()
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut s = vec![0; self.k];
        for &f in &self.fold_of {
            s[f] += 1;
        }
        s
    }

    /// Hex SHA-256 of the assignment, for checking that two runs used the
    /// same folds.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("k={};", self.k));
        for f in &self.fold_of {
            h.update(format!("{f},"));
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Each class is shuffled separately, the classes are concatenated
/// (positives first) and position `i` goes to fold `i % k`. Fold sizes and
/// per-fold class counts then differ by at most one.
pub fn kfold(labels: &[Label], k: usize, rng_seed: u64) -> Result<FoldAssignment> {
    let n = labels.len();
    if k < 2 || k > n {
        return Err(ClassifyError::InvalidFolds { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut pos: Vec<usize> = (0..n).filter(|&i| labels[i].is_pos()).collect();
    let mut neg: Vec<usize> = (0..n).filter(|&i| !labels[i].is_pos()).collect();
    pos.shuffle(&mut rng);
    neg.shuffle(&mut rng);
    let mut fold_of = vec![0; n];
    for (slot, idx) in pos.into_iter().chain(neg).enumerate() {
        fold_of[idx] = slot % k;
    }
    Ok(FoldAssignment { k, fold_of })
}
