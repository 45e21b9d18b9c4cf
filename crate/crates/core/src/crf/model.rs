//! CRF parameters, score construction and the per-sequence gradient.
//!
//! All weights live in one vector laid out as unary weights (`features x
//! labels`), then dense weights (`dense_dim x labels`), then transition
//! weights (`labels x labels`).

use super::inference::{forward_backward, sequence_score, viterbi, Scores};
use super::instance::{FeatureAlphabet, SequenceInstance};
use super::labels::{decode_bilou, LabelAlphabet, Span};
use crate::error::Result;

/// Sparse gradient: `(coordinate, value)` pairs, sorted and unique.
pub type SparseGrad = Vec<(usize, f64)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layout {
    pub labels: usize,
    pub features: usize,
    pub dense_dim: usize,
}

impl Layout {
    pub fn unary(&self, feature: usize, label: usize) -> usize {
        feature * self.labels + label
    }

    pub fn dense(&self, k: usize, label: usize) -> usize {
        (self.features + k) * self.labels + label
    }

    pub fn trans(&self, prev: usize, cur: usize) -> usize {
        (self.features + self.dense_dim) * self.labels + prev * self.labels + cur
    }

    pub fn len(&self) -> usize {
        (self.features + self.dense_dim + self.labels) * self.labels
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Anything that can produce a weight by coordinate.
pub trait WeightSource {
    fn weight(&self, i: usize) -> f64;
}

impl WeightSource for [f64] {
    fn weight(&self, i: usize) -> f64 {
        self[i]
    }
}

impl WeightSource for Vec<f64> {
    fn weight(&self, i: usize) -> f64 {
        self[i]
    }
}

pub fn build_scores<W: WeightSource + ?Sized>(w: &W, layout: &Layout, inst: &SequenceInstance) -> Scores {
    let l = layout.labels;
    let mut unary = vec![0.0; inst.len() * l];
    for (t, tok) in inst.tokens.iter().enumerate() {
        let row = &mut unary[t * l..(t + 1) * l];
        for &f in &tok.features {
            for (y, r) in row.iter_mut().enumerate() {
                *r += w.weight(layout.unary(f as usize, y));
            }
        }
        for (k, &x) in tok.dense.iter().enumerate() {
            if x != 0.0 {
                for (y, r) in row.iter_mut().enumerate() {
                    *r += x * w.weight(layout.dense(k, y));
                }
            }
        }
    }
    let trans = (0..l * l).map(|i| w.weight(layout.trans(i / l, i % l))).collect();
    Scores::new(l, unary, trans)
}

/// `log p(gold | tokens)` and its gradient with respect to the weights
/// (empirical minus expected feature counts).
pub fn loglik_grad<W: WeightSource + ?Sized>(w: &W, layout: &Layout, inst: &SequenceInstance) -> (f64, SparseGrad) {
    let gold = inst.gold.as_ref().expect("gold labels required");
    let l = layout.labels;
    let scores = build_scores(w, layout, inst);
    let m = forward_backward(&scores);
    let ll = sequence_score(&scores, gold) - m.log_z;

    let mut grad: SparseGrad = Vec::new();
    for (t, tok) in inst.tokens.iter().enumerate() {
        let marg = &m.node[t * l..(t + 1) * l];
        let diff = |y: usize| (gold[t] == y) as u8 as f64 - marg[y];
        for &f in &tok.features {
            for y in 0..l {
                grad.push((layout.unary(f as usize, y), diff(y)));
            }
        }
        for (k, &x) in tok.dense.iter().enumerate() {
            if x != 0.0 {
                for y in 0..l {
                    grad.push((layout.dense(k, y), x * diff(y)));
                }
            }
        }
    }
    let mut trans = m.edge.iter().map(|e| -e).collect::<Vec<_>>();
    for w in gold.windows(2) {
        trans[w[0] * l + w[1]] += 1.0;
    }
    grad.extend(trans.into_iter().enumerate().map(|(i, g)| (layout.trans(i / l, i % l), g)));
    (ll, merge(grad))
}

/// Sorts by coordinate and sums duplicates.
pub(crate) fn merge(mut grad: SparseGrad) -> SparseGrad {
    grad.sort_unstable_by_key(|e| e.0);
    let mut out: SparseGrad = Vec::with_capacity(grad.len());
    for (i, g) in grad {
        match out.last_mut() {
            Some(last) if last.0 == i => last.1 += g,
            _ => out.push((i, g)),
        }
    }
    out
}

/// A trained (or zero) linear-chain CRF.
#[derive(Clone, Debug, PartialEq)]
pub struct CrfModel {
    pub(crate) labels: LabelAlphabet,
    pub(crate) features: FeatureAlphabet,
    pub(crate) dense_dim: usize,
    pub(crate) weights: Vec<f64>,
}

impl CrfModel {
    pub fn zeros(labels: LabelAlphabet, features: FeatureAlphabet, dense_dim: usize) -> Self {
        let layout = Layout {
            labels: labels.len(),
            features: features.len(),
            dense_dim,
        };
        CrfModel {
            labels,
            features,
            dense_dim,
            weights: vec![0.0; layout.len()],
        }
    }

    /// Builds a model from explicit weights laid out per [`Layout`].
    pub fn from_weights(labels: LabelAlphabet, features: FeatureAlphabet, dense_dim: usize, weights: Vec<f64>) -> Result<Self> {
        let mut m = Self::zeros(labels, features, dense_dim);
        if weights.len() != m.weights.len() {
            return Err(crate::Error::DimensionMismatch {
                expected: m.weights.len(),
                found: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(crate::Error::InvalidArgument("weights must be finite".into()));
        }
        m.weights = weights;
        Ok(m)
    }

    pub fn layout(&self) -> Layout {
        Layout {
            labels: self.labels.len(),
            features: self.features.len(),
            dense_dim: self.dense_dim,
        }
    }

    pub fn labels(&self) -> &LabelAlphabet {
        &self.labels
    }

    pub fn features(&self) -> &FeatureAlphabet {
        &self.features
    }

    pub fn dense_dim(&self) -> usize {
        self.dense_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weights_mut(&mut self) -> &mut [f64] {
        &mut self.weights
    }

    pub fn nonzero_weights(&self) -> usize {
        self.weights.iter().filter(|&&w| w != 0.0).count()
    }

    pub fn scores(&self, inst: &SequenceInstance) -> Scores {
        build_scores(&self.weights, &self.layout(), inst)
    }

    pub fn viterbi(&self, inst: &SequenceInstance) -> Vec<usize> {
        viterbi(&self.scores(inst))
    }

    pub fn predict_spans(&self, inst: &SequenceInstance) -> Vec<Span> {
        decode_bilou(&self.viterbi(inst), &self.labels)
    }
}

/// Log-likelihood of the gold labels and its exact sparse gradient.
pub fn seq_loglik_grad(model: &CrfModel, inst: &SequenceInstance) -> (f64, SparseGrad) {
    loglik_grad(&model.weights, &model.layout(), inst)
}
