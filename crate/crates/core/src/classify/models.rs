//! The four classifiers: cosine k-NN, Gaussian naive Bayes, logistic
//! regression and a one-hidden-layer perceptron, both trained by mini-batch
//! SGD on standardized features.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{ClassifyError, Label};
use crate::scalar::{dot, norm, Scalar};

const VARIANCE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SgdConfig {
    pub lr: f64,
    pub epochs: usize,
    pub batch: usize,
    pub seed: u64,
}

impl Default for SgdConfig {
    fn default() -> Self {
        Self { lr: 0.0005, epochs: 500, batch: 100, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ClassifierSpec {
    Knn { k: usize },
    NaiveBayes,
    LogisticSgd { sgd: SgdConfig },
    Mlp { hidden: usize, sgd: SgdConfig },
}

impl ClassifierSpec {
    /// The four configurations evaluated by default.
    pub fn defaults() -> Vec<Self> {
        vec![
            Self::Knn { k: 5 },
            Self::NaiveBayes,
            Self::LogisticSgd { sgd: SgdConfig::default() },
            Self::Mlp { hidden: 6, sgd: SgdConfig::default() },
        ]
    }

    pub fn with_seed(self, seed: u64) -> Self {
        match self {
            Self::LogisticSgd { sgd } => Self::LogisticSgd { sgd: SgdConfig { seed, ..sgd } },
            Self::Mlp { hidden, sgd } => Self::Mlp { hidden, sgd: SgdConfig { seed, ..sgd } },
            other => other,
        }
    }

    pub fn fit<T: Scalar>(&self, xs: &[&[T]], ys: &[Label]) -> TrainedModel<T> {
        assert_eq!(xs.len(), ys.len());
        match *self {
            Self::Knn { k } => TrainedModel::Knn(Knn::fit(k, xs, ys)),
            Self::NaiveBayes => TrainedModel::NaiveBayes(GaussianNb::fit(xs, ys)),
            Self::LogisticSgd { sgd } => TrainedModel::Logistic(Logistic::fit(&sgd, xs, ys)),
            Self::Mlp { hidden, sgd } => TrainedModel::Mlp(Mlp::fit(hidden, &sgd, xs, ys)),
        }
    }
}

/// `knn:K`, `naive_bayes`, `logistic_sgd`, `mlp` or `mlp:H`.
impl FromStr for ClassifierSpec {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ClassifyError::BadSpec(s.to_string());
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a.parse::<usize>().map_err(|_| bad())?)),
            None => (s, None),
        };
        match (name, arg) {
            ("knn", Some(k)) if k > 0 => Ok(Self::Knn { k }),
            ("knn", None) => Ok(Self::Knn { k: 5 }),
            ("naive_bayes", None) => Ok(Self::NaiveBayes),
            ("logistic_sgd", None) => Ok(Self::LogisticSgd { sgd: SgdConfig::default() }),
            ("mlp", None) => Ok(Self::Mlp { hidden: 6, sgd: SgdConfig::default() }),
            ("mlp", Some(h)) if h > 0 => Ok(Self::Mlp { hidden: h, sgd: SgdConfig::default() }),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for ClassifierSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Knn { k } => write!(f, "knn:{k}"),
            Self::NaiveBayes => f.write_str("naive_bayes"),
            Self::LogisticSgd { .. } => f.write_str("logistic_sgd"),
            Self::Mlp { hidden, .. } => write!(f, "mlp:{hidden}"),
        }
    }
}

#[derive(Debug, Clone)]
pub enum TrainedModel<T> {
    Knn(Knn<T>),
    NaiveBayes(GaussianNb<T>),
    Logistic(Logistic<T>),
    Mlp(Mlp<T>),
}

impl<T: Scalar> TrainedModel<T> {
    pub fn predict(&self, x: &[T]) -> Label {
        match self {
            Self::Knn(m) => m.predict(x),
            Self::NaiveBayes(m) => m.predict(x),
            Self::Logistic(m) => m.predict(x),
            Self::Mlp(m) => m.predict(x),
        }
    }
}

fn label_of(pos: bool) -> Label {
    if pos {
        Label::Pos
    } else {
        Label::Neg
    }
}

#[derive(Debug, Clone)]
pub struct Knn<T> {
    k: usize,
    points: Vec<Vec<T>>,
    norms: Vec<T>,
    labels: Vec<Label>,
}

impl<T: Scalar> Knn<T> {
    fn fit(k: usize, xs: &[&[T]], ys: &[Label]) -> Self {
        Self {
            k: k.max(1),
            points: xs.iter().map(|x| x.to_vec()).collect(),
            norms: xs.iter().map(|x| norm(x)).collect(),
            labels: ys.to_vec(),
        }
    }

    fn cosine(&self, i: usize, x: &[T], xn: T) -> T {
        let d = self.norms[i] * xn;
        if d > T::zero() {
            dot(&self.points[i], x) / d
        } else {
            T::zero()
        }
    }

    /// Majority vote among the `k` most cosine-similar training points
    /// (ties in similarity go to the earlier point). A tied vote takes the
    /// label of the single nearest neighbour.
    fn predict(&self, x: &[T]) -> Label {
        if self.points.is_empty() {
            return Label::Neg;
        }
        let xn = norm(x);
        let mut sims: Vec<(T, usize)> = (0..self.points.len()).map(|i| (self.cosine(i, x, xn), i)).collect();
        sims.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal).then(a.1.cmp(&b.1)));
        let top = &sims[..self.k.min(sims.len())];
        let pos = top.iter().filter(|(_, i)| self.labels[*i].is_pos()).count();
        let neg = top.len() - pos;
        match pos.cmp(&neg) {
            std::cmp::Ordering::Greater => Label::Pos,
            std::cmp::Ordering::Less => Label::Neg,
            std::cmp::Ordering::Equal => self.labels[top[0].1],
        }
    }
}

#[derive(Debug, Clone)]
struct ClassStats<T> {
    log_prior: T,
    mean: Vec<T>,
    var: Vec<T>,
}

#[derive(Debug, Clone)]
pub struct GaussianNb<T> {
    classes: Vec<(Label, ClassStats<T>)>,
}

impl<T: Scalar> GaussianNb<T> {
    fn fit(xs: &[&[T]], ys: &[Label]) -> Self {
        let n = xs.len();
        let dim = xs.first().map_or(0, |x| x.len());
        let mut classes = Vec::new();
        let mut floored = 0usize;
        for label in [Label::Pos, Label::Neg] {
            let rows: Vec<&[T]> = xs.iter().zip(ys).filter(|(_, &y)| y == label).map(|(x, _)| *x).collect();
            if rows.is_empty() {
                log::warn!("naive Bayes training fold has no {label:?} examples");
                continue;
            }
            let m = T::of_usize(rows.len());
            let mut mean = vec![T::zero(); dim];
            for r in &rows {
                for (a, &v) in mean.iter_mut().zip(r.iter()) {
                    *a += v;
                }
            }
            mean.iter_mut().for_each(|a| *a /= m);
            let mut var = vec![T::zero(); dim];
            for r in &rows {
                for ((a, &v), &mu) in var.iter_mut().zip(r.iter()).zip(&mean) {
                    *a += (v - mu) * (v - mu);
                }
            }
            for a in var.iter_mut() {
                *a /= m;
                if *a < T::of(VARIANCE_FLOOR) {
                    *a = T::of(VARIANCE_FLOOR);
                    floored += 1;
                }
            }
            let log_prior = (m / T::of_usize(n)).ln();
            classes.push((label, ClassStats { log_prior, mean, var }));
        }
        if floored > 0 {
            log::warn!("naive Bayes: {floored} feature variances raised to the floor {VARIANCE_FLOOR:e}");
        }
        Self { classes }
    }

    fn log_likelihood(stats: &ClassStats<T>, x: &[T]) -> T {
        let two_pi = T::of(2.0 * std::f64::consts::PI);
        let mut acc = stats.log_prior;
        for ((&v, &mu), &var) in x.iter().zip(&stats.mean).zip(&stats.var) {
            acc -= T::of(0.5) * ((two_pi * var).ln() + (v - mu) * (v - mu) / var);
        }
        acc
    }

    fn predict(&self, x: &[T]) -> Label {
        let mut best: Option<(T, Label)> = None;
        for (label, stats) in &self.classes {
            let ll = Self::log_likelihood(stats, x);
            if best.is_none_or(|(b, _)| ll > b) {
                best = Some((ll, *label));
            }
        }
        best.map_or(Label::Neg, |(_, l)| l)
    }
}

/// Per-feature affine map fitted on the training fold.
#[derive(Debug, Clone)]
struct Standardizer<T> {
    mean: Vec<T>,
    scale: Vec<T>,
}

impl<T: Scalar> Standardizer<T> {
    fn fit(xs: &[&[T]]) -> Self {
        let dim = xs.first().map_or(0, |x| x.len());
        let n = T::of_usize(xs.len().max(1));
        let mut mean = vec![T::zero(); dim];
        for x in xs {
            for (a, &v) in mean.iter_mut().zip(x.iter()) {
                *a += v;
            }
        }
        mean.iter_mut().for_each(|a| *a /= n);
        let mut scale = vec![T::zero(); dim];
        for x in xs {
            for ((a, &v), &mu) in scale.iter_mut().zip(x.iter()).zip(&mean) {
                *a += (v - mu) * (v - mu);
            }
        }
        for s in scale.iter_mut() {
            *s = (*s / n).sqrt();
            if *s <= T::of(1e-12) {
                *s = T::one();
            }
        }
        Self { mean, scale }
    }

    fn apply(&self, x: &[T]) -> Vec<T> {
        x.iter().zip(&self.mean).zip(&self.scale).map(|((&v, &m), &s)| (v - m) / s).collect()
    }
}

fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

fn target<T: Scalar>(y: Label) -> T {
    if y.is_pos() {
        T::one()
    } else {
        T::zero()
    }
}

#[derive(Debug, Clone)]
pub struct Logistic<T> {
    std: Standardizer<T>,
    w: Vec<T>,
    b: T,
}

impl<T: Scalar> Logistic<T> {
    fn fit(cfg: &SgdConfig, xs: &[&[T]], ys: &[Label]) -> Self {
        let std = Standardizer::fit(xs);
        let zs: Vec<Vec<T>> = xs.iter().map(|x| std.apply(x)).collect();
        let dim = std.mean.len();
        let mut w = vec![T::zero(); dim];
        let mut b = T::zero();
        let lr = T::of(cfg.lr);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut order: Vec<usize> = (0..zs.len()).collect();
        let mut gw = vec![T::zero(); dim];
        for _ in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(cfg.batch.max(1)) {
                gw.iter_mut().for_each(|g| *g = T::zero());
                let mut gb = T::zero();
                for &i in batch {
                    let err = sigmoid(dot(&w, &zs[i]) + b) - target::<T>(ys[i]);
                    for (g, &v) in gw.iter_mut().zip(&zs[i]) {
                        *g += err * v;
                    }
                    gb += err;
                }
                let m = T::of_usize(batch.len());
                for (wi, &g) in w.iter_mut().zip(&gw) {
                    *wi -= lr * g / m;
                }
                b -= lr * gb / m;
            }
        }
        Self { std, w, b }
    }

    pub fn probability(&self, x: &[T]) -> T {
        sigmoid(dot(&self.w, &self.std.apply(x)) + self.b)
    }

    fn predict(&self, x: &[T]) -> Label {
        label_of(self.probability(x) >= T::of(0.5))
    }
}

#[derive(Debug, Clone)]
pub struct Mlp<T> {
    std: Standardizer<T>,
    /// `hidden × dim`, row-major.
    w1: Vec<T>,
    b1: Vec<T>,
    w2: Vec<T>,
    b2: T,
}

impl<T: Scalar> Mlp<T> {
    fn fit(hidden: usize, cfg: &SgdConfig, xs: &[&[T]], ys: &[Label]) -> Self {
        let std = Standardizer::fit(xs);
        let zs: Vec<Vec<T>> = xs.iter().map(|x| std.apply(x)).collect();
        let dim = std.mean.len();
        let h = hidden.max(1);
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let lim1 = (6.0 / (dim + h) as f64).sqrt();
        let lim2 = (6.0 / (h + 1) as f64).sqrt();
        let mut net = Self {
            w1: (0..h * dim).map(|_| T::of(rng.gen_range(-lim1..=lim1))).collect(),
            b1: vec![T::zero(); h],
            w2: (0..h).map(|_| T::of(rng.gen_range(-lim2..=lim2))).collect(),
            b2: T::zero(),
            std,
        };
        let lr = T::of(cfg.lr);
        let mut order: Vec<usize> = (0..zs.len()).collect();
        let mut gw1 = vec![T::zero(); h * dim];
        let mut gb1 = vec![T::zero(); h];
        let mut gw2 = vec![T::zero(); h];
        let mut act = vec![T::zero(); h];
        for _ in 0..cfg.epochs {
            order.shuffle(&mut rng);
            for batch in order.chunks(cfg.batch.max(1)) {
                gw1.iter_mut().chain(gb1.iter_mut()).chain(gw2.iter_mut()).for_each(|g| *g = T::zero());
                let mut gb2 = T::zero();
                for &i in batch {
                    let z = &zs[i];
                    net.hidden(z, &mut act);
                    let err = sigmoid(dot(&net.w2, &act) + net.b2) - target::<T>(ys[i]);
                    gb2 += err;
                    for j in 0..h {
                        gw2[j] += err * act[j];
                        let delta = err * net.w2[j] * (T::one() - act[j] * act[j]);
                        gb1[j] += delta;
                        for (g, &v) in gw1[j * dim..(j + 1) * dim].iter_mut().zip(z) {
                            *g += delta * v;
                        }
                    }
                }
                let step = lr / T::of_usize(batch.len());
                for (w, &g) in net.w1.iter_mut().zip(&gw1) {
                    *w -= step * g;
                }
                for (w, &g) in net.b1.iter_mut().zip(&gb1) {
                    *w -= step * g;
                }
                for (w, &g) in net.w2.iter_mut().zip(&gw2) {
                    *w -= step * g;
                }
                net.b2 -= step * gb2;
            }
        }
        net
    }

    fn hidden(&self, z: &[T], out: &mut [T]) {
        let dim = z.len();
        for (j, o) in out.iter_mut().enumerate() {
            *o = (dot(&self.w1[j * dim..(j + 1) * dim], z) + self.b1[j]).tanh();
        }
    }

    pub fn probability(&self, x: &[T]) -> T {
        let z = self.std.apply(x);
        let mut act = vec![T::zero(); self.b1.len()];
        self.hidden(&z, &mut act);
        sigmoid(dot(&self.w2, &act) + self.b2)
    }

    fn predict(&self, x: &[T]) -> Label {
        label_of(self.probability(x) >= T::of(0.5))
    }
}
