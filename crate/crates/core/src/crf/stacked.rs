//! Two-layer stacked CRF.
//!
//! Layer 1 is trained on the base features. Layer 2 sees the base features
//! plus layer-1 predicted labels at offsets `-radius..=radius`. To keep
//! those features honest at training time, layer-1 predictions for the
//! training set come from k-fold jackknifing: each contiguous fold is
//! tagged by a layer-1 model trained on the remaining folds.

use std::ops::Range;

use rayon::prelude::*;

use super::instance::{FeatureAlphabet, RawSequence, SequenceInstance};
use super::labels::{LabelAlphabet, Span};
use super::model::CrfModel;
use super::train::{train_crf, train_weights, CrfTrainConfig};
use crate::error::{Error, Result};

pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_STACK_RADIUS: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct StackedConfig {
    pub crf: CrfTrainConfig,
    pub folds: usize,
    pub radius: usize,
}

impl Default for StackedConfig {
    fn default() -> Self {
        StackedConfig {
            crf: CrfTrainConfig::default(),
            folds: DEFAULT_FOLDS,
            radius: DEFAULT_STACK_RADIUS,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StackedModel {
    pub layer1: CrfModel,
    pub layer2: CrfModel,
    pub radius: usize,
}

/// Name of the layer-2 feature for a layer-1 prediction at `offset`.
pub fn prediction_feature(offset: isize, label: &str) -> String {
    format!("l1[{offset}]={label}")
}

/// Appends layer-1 prediction features to a copy of `raw`.
pub fn stack_features(raw: &RawSequence, predicted: &[usize], labels: &LabelAlphabet, radius: usize) -> RawSequence {
    let mut out = raw.clone();
    let n = predicted.len() as isize;
    let r = radius as isize;
    for (t, feats) in out.features.iter_mut().enumerate() {
        for o in -r..=r {
            let j = t as isize + o;
            if (0..n).contains(&j) {
                feats.push(prediction_feature(o, &labels.name(predicted[j as usize])));
            }
        }
    }
    out
}

/// Contiguous folds partitioning `0..n` into `min(k, n)` near-equal parts.
pub fn jackknife_folds(n: usize, k: usize) -> Vec<Range<usize>> {
    let k = k.min(n).max(1);
    (0..k).map(|i| i * n / k..(i + 1) * n / k).filter(|r| !r.is_empty()).collect()
}

fn fold_config(cfg: &CrfTrainConfig, fold: usize) -> CrfTrainConfig {
    CrfTrainConfig {
        seed: cfg.seed.wrapping_add(1 + fold as u64),
        ..cfg.clone()
    }
}

/// Trains layer 1 on `data` and layer 2 on jackknifed layer-1 predictions.
pub fn train_stacked(data: &[RawSequence], labels: LabelAlphabet, dense_dim: usize, config: &StackedConfig) -> Result<StackedModel> {
    if data.is_empty() {
        return Err(Error::Empty("CRF training data"));
    }
    if config.folds < 2 {
        return Err(Error::InvalidArgument("stacking needs at least 2 folds".into()));
    }
    let mut alphabet = FeatureAlphabet::new();
    let instances: Vec<SequenceInstance> = data.iter().map(|r| r.intern(&mut alphabet)).collect();
    let layer1 = train_crf(&instances, labels.clone(), alphabet, dense_dim, &config.crf)?;
    let layout = layer1.layout();

    let folds = jackknife_folds(data.len(), config.folds);
    let predictions: Vec<Vec<Vec<usize>>> = if folds.len() < 2 {
        // a single sequence cannot be held out; fall back to layer 1's own output
        vec![instances.iter().map(|i| layer1.viterbi(i)).collect()]
    } else {
        folds
            .par_iter()
            .enumerate()
            .map(|(f, range)| {
                let train: Vec<&SequenceInstance> =
                    instances.iter().enumerate().filter(|(i, _)| !range.contains(i)).map(|e| e.1).collect();
                let weights = train_weights(&train, &layout, &fold_config(&config.crf, f))?;
                let mut m = CrfModel::zeros(labels.clone(), FeatureAlphabet::new(), dense_dim);
                m.weights = weights;
                m.features = layer1.features.clone();
                Ok(instances[range.clone()].iter().map(|i| m.viterbi(i)).collect())
            })
            .collect::<Result<_>>()?
    };
    let predictions: Vec<Vec<usize>> = predictions.into_iter().flatten().collect();

    let mut alphabet2 = FeatureAlphabet::new();
    let instances2: Vec<SequenceInstance> = data
        .iter()
        .zip(&predictions)
        .map(|(r, p)| stack_features(r, p, &labels, config.radius).intern(&mut alphabet2))
        .collect();
    let layer2 = train_crf(&instances2, labels, alphabet2, dense_dim, &config.crf)?;
    Ok(StackedModel {
        layer1,
        layer2,
        radius: config.radius,
    })
}

impl StackedModel {
    pub fn labels(&self) -> &LabelAlphabet {
        self.layer2.labels()
    }

    pub fn dense_dim(&self) -> usize {
        self.layer2.dense_dim()
    }

    pub fn predict_layer1(&self, raw: &RawSequence) -> Vec<usize> {
        self.layer1.viterbi(&raw.lookup(self.layer1.features()))
    }

    pub fn predict(&self, raw: &RawSequence) -> Vec<usize> {
        let first = self.predict_layer1(raw);
        let stacked = stack_features(raw, &first, self.labels(), self.radius);
        self.layer2.viterbi(&stacked.lookup(self.layer2.features()))
    }

    pub fn predict_spans(&self, raw: &RawSequence) -> Vec<Span> {
        super::labels::decode_bilou(&self.predict(raw), self.labels())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_partition() {
        for n in 0..40 {
            for k in 1..8 {
                let folds = jackknife_folds(n, k);
                let covered: Vec<usize> = folds.iter().flat_map(|r| r.clone()).collect();
                assert_eq!(covered, (0..n).collect::<Vec<_>>());
                assert!(folds.len() <= k);
            }
        }
        assert_eq!(jackknife_folds(10, 5).len(), 5);
    }

    fn toy() -> (Vec<RawSequence>, LabelAlphabet) {
        let labels = LabelAlphabet::new(&["X"]).unwrap();
        let u = labels.parse("U-X").unwrap();
        let data = (0..12)
            .map(|i| {
                let toks: Vec<String> = ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect();
                let hot = i % 4;
                RawSequence {
                    features: toks
                        .iter()
                        .enumerate()
                        .map(|(j, t)| vec![format!("w={t}"), format!("hot={}", j == hot)])
                        .collect(),
                    tokens: toks,
                    dense: vec![],
                    gold: Some((0..4).map(|j| if j == hot { u } else { 0 }).collect()),
                }
            })
            .collect();
        (data, labels)
    }

    #[test]
    fn layer2_alphabet_extends_layer1() {
        let (data, labels) = toy();
        let m = train_stacked(&data, labels, 0, &StackedConfig::default()).unwrap();
        let f1 = m.layer1.features();
        let f2 = m.layer2.features();
        assert!(f1.names().iter().all(|n| f2.contains(n)));
        let extra: Vec<&String> = f2.names().iter().filter(|n| !f1.contains(n)).collect();
        assert!(!extra.is_empty());
        assert!(extra.iter().all(|n| n.starts_with("l1[")));
        for r in &data {
            assert_eq!(&m.predict(r), r.gold.as_ref().unwrap());
        }
    }

    #[test]
    fn stack_features_respect_bounds() {
        let labels = LabelAlphabet::new(&["X"]).unwrap();
        let raw = RawSequence {
            tokens: vec!["a".into(), "b".into()],
            features: vec![vec![], vec![]],
            dense: vec![],
            gold: None,
        };
        let s = stack_features(&raw, &[0, 4], &labels, 2);
        assert_eq!(s.features[0], vec!["l1[0]=O", "l1[1]=U-X"]);
        assert_eq!(s.features[1], vec!["l1[-1]=O", "l1[0]=U-X"]);
    }
}
