//! Linear-chain CRF engine: BILOU label codec, exact inference, AdaGrad
//! RDA training with ℓ1/ℓ2 regularization, and two-layer stacking.
//!
//! Weights combine sparse binary features, an optional dense block that
//! enters as label-conditioned linear terms, and label-pair transitions.

mod inference;
mod instance;
mod labels;
mod model;
pub(crate) mod persist;
mod rda;
mod stacked;
mod train;

pub use inference::{forward_backward, log_partition, sequence_score, viterbi, Marginals, Scores};
pub use instance::{FeatureAlphabet, RawSequence, SequenceInstance, Token};
pub use labels::{decode_bilou, encode_bilou, LabelAlphabet, Span, Tag};
pub use model::{build_scores, seq_loglik_grad, CrfModel, Layout, SparseGrad, WeightSource};
pub use persist::CRF_FORMAT_VERSION;
pub use rda::{rda_update, RdaState};
pub use stacked::{
    jackknife_folds, prediction_feature, stack_features, train_stacked, StackedConfig, StackedModel,
    DEFAULT_FOLDS, DEFAULT_STACK_RADIUS,
};
pub use train::{mean_loglik, train_crf, CrfTrainConfig};
