//! Stochastic training of a single CRF with AdaGrad RDA.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::instance::{FeatureAlphabet, SequenceInstance};
use super::labels::LabelAlphabet;
use super::model::{loglik_grad, CrfModel, Layout};
use super::rda::RdaState;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct CrfTrainConfig {
    pub epochs: usize,
    /// AdaGrad base rate η.
    pub eta: f64,
    /// ℓ1 strength λ1 (threshold on the mean gradient).
    pub l1: f64,
    /// ℓ2 strength λ2.
    pub l2: f64,
    pub seed: u64,
}

impl Default for CrfTrainConfig {
    fn default() -> Self {
        CrfTrainConfig {
            epochs: 10,
            eta: 0.1,
            l1: 1e-5,
            l2: 1e-6,
            seed: 1,
        }
    }
}

/// Trains a CRF on `data`, visiting instances in a fresh seeded shuffle
/// each epoch and applying one RDA step per instance. Zero epochs yield
/// the all-zero model.
pub fn train_crf(
    data: &[SequenceInstance],
    labels: LabelAlphabet,
    features: FeatureAlphabet,
    dense_dim: usize,
    config: &CrfTrainConfig,
) -> Result<CrfModel> {
    let refs: Vec<&SequenceInstance> = data.iter().collect();
    let mut model = CrfModel::zeros(labels, features, dense_dim);
    model.weights = train_weights(&refs, &model.layout(), config)?;
    Ok(model)
}

pub(crate) fn train_weights(data: &[&SequenceInstance], layout: &Layout, config: &CrfTrainConfig) -> Result<Vec<f64>> {
    if data.is_empty() {
        return Err(Error::Empty("CRF training data"));
    }
    for inst in data {
        if inst.gold.is_none() {
            return Err(Error::InvalidArgument("training instance without gold labels".into()));
        }
        inst.validate(layout.features, layout.dense_dim, layout.labels)?;
    }
    let mut state = RdaState::new(layout.len(), config.eta, config.l1, config.l2)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut neg = Vec::new();
    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        for &i in &order {
            let (_, grad) = loglik_grad(&state, layout, data[i]);
            neg.clear();
            neg.extend(grad.into_iter().map(|(c, g)| (c, -g)));
            state.step(&neg);
        }
    }
    Ok(state.weights())
}

/// Mean per-instance log-likelihood of gold labels under `model`.
pub fn mean_loglik(model: &CrfModel, data: &[SequenceInstance]) -> f64 {
    let layout = model.layout();
    let total: f64 = data.iter().map(|inst| loglik_grad(&model.weights, &layout, inst).0).sum();
    total / data.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::super::instance::Token;
    use super::super::model::tests::random_instance;
    use super::*;

    fn separable() -> (Vec<SequenceInstance>, LabelAlphabet, FeatureAlphabet) {
        // label = U-A for tokens carrying feature 1, O for feature 0
        let labels = LabelAlphabet::new(&["A"]).unwrap();
        let feats = FeatureAlphabet::from_names(vec!["w=o".into(), "w=a".into()]).unwrap();
        let u = labels.parse("U-A").unwrap();
        let patterns = [[0, 1, 0, 1], [1, 1, 0, 0], [0, 0, 1, 0], [1, 0, 1, 1]];
        let data = patterns
            .iter()
            .map(|p| SequenceInstance {
                tokens: p
                    .iter()
                    .map(|&f| Token { form: String::new(), features: vec![f], dense: vec![] })
                    .collect(),
                gold: Some(p.iter().map(|&f| if f == 1 { u } else { 0 }).collect()),
            })
            .collect();
        (data, labels, feats)
    }

    #[test]
    fn zero_epochs_is_zero_model() {
        let (data, labels, feats) = separable();
        let cfg = CrfTrainConfig { epochs: 0, ..Default::default() };
        let m = train_crf(&data, labels, feats, 0, &cfg).unwrap();
        assert_eq!(m.nonzero_weights(), 0);
    }

    #[test]
    fn separable_data_is_fit_within_ten_epochs() {
        let (data, labels, feats) = separable();
        let cfg = CrfTrainConfig { epochs: 10, ..Default::default() };
        let m = train_crf(&data, labels.clone(), feats.clone(), 0, &cfg).unwrap();
        for inst in &data {
            assert_eq!(&m.viterbi(inst), inst.gold.as_ref().unwrap());
        }
        let zero = CrfModel::zeros(labels, feats, 0);
        assert!(mean_loglik(&m, &data) > mean_loglik(&zero, &data));
    }

    #[test]
    fn errors_and_determinism() {
        let (data, labels, feats) = separable();
        let cfg = CrfTrainConfig::default();
        assert!(matches!(train_crf(&[], labels.clone(), feats.clone(), 0, &cfg), Err(Error::Empty(_))));
        let mut unlabeled = data.clone();
        unlabeled[0].gold = None;
        assert!(train_crf(&unlabeled, labels.clone(), feats.clone(), 0, &cfg).is_err());
        let a = train_crf(&data, labels.clone(), feats.clone(), 0, &cfg).unwrap();
        let b = train_crf(&data, labels, feats, 0, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn l1_sweep_is_sparsity_monotone() {
        let mut rng = <ChaCha8Rng as SeedableRng>::seed_from_u64(6);
        let labels = LabelAlphabet::new(&["A"]).unwrap();
        let names: Vec<String> = (0..30).map(|i| format!("f{i}")).collect();
        let feats = FeatureAlphabet::from_names(names).unwrap();
        let data: Vec<SequenceInstance> = (0..40).map(|_| random_instance(&mut rng, 5, 30, 0, labels.len())).collect();
        let mut last = usize::MAX;
        for l1 in [0.0, 0.001, 0.01, 0.05, 0.1, 0.3] {
            let cfg = CrfTrainConfig { epochs: 30, l1, ..Default::default() };
            let nz = train_crf(&data, labels.clone(), feats.clone(), 0, &cfg).unwrap().nonzero_weights();
            assert!(nz <= last, "l1 {l1}: {nz} > {last}");
            last = nz;
        }
        assert!(last < CrfModel::zeros(labels, feats, 0).weights().len());
    }
}
