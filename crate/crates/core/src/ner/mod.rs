//! Named-entity recognition on top of the CRF engine: CoNLL ingestion,
//! baseline feature templates, phrase-embedding features, Brown-cluster
//! and gazetteer features, span scoring, tagging, and grid search.

mod clusters;
mod conll;
mod eval;
mod features;
mod grid;
mod phrases;
mod tagger;

pub use clusters::{brown_features, ClusterTable, BROWN_PREFIX_LENGTHS};
pub use conll::{iob_to_spans, parse_conll, read_conll, spans_to_bio, write_tagged, Document, Sentence, DOCSTART};
pub use eval::{score_spans, EvalReport, Prf};
pub use features::{
    cap_pattern, char_ngrams, dense_features, digitless_lower, document_sequences, entity_types, feature_counts,
    is_punctuation, sentence_features, token_features, FeatureConfig, Resources, DEFAULT_BAG_RADIUS,
    DEFAULT_NEIGHBOR_RADIUS, MAX_GAZETTEER_LEN,
};
pub use grid::{grid_search, GridConfig, GridResult};
pub use phrases::{assign_phrases, embedding_block, DEFAULT_PHRASE_LEN};
pub use tagger::{tag, train_ner, NerCrf, NerModel, NerTrainConfig, NER_FORMAT_VERSION};
