//! Lexicon-infused phrase embeddings and a stacked CRF named-entity tagger.
//!
//! The crate covers the whole pipeline:
//!
//! - [`corpus`]: tokenization, PMI phrase mining, phrase vocabularies and
//!   corpus segmentation.
//! - [`huffman`]: the Huffman tree behind hierarchical softmax.
//! - [`lexicons`]: named word lists and negative-label subsampling.
//! - [`embedder`]: skip-gram training with optional lexicon classifiers,
//!   the reference objective, persistence, nearest neighbours and
//!   analogy evaluation.
//! - [`crf`]: BILOU labels, exact linear-chain inference, AdaGrad RDA
//!   training and two-layer stacking.
//! - [`ner`]: CoNLL I/O, feature templates, gazetteers, Brown clusters,
//!   phrase-embedding features, the tagger, span F1 and grid search.
//! - [`synth`]: seeded synthetic corpora for tests and examples.
//! - [`cli`]: the `lexemb` command line.

pub mod cli;
pub mod corpus;
pub mod crf;
pub mod embedder;
pub mod error;
pub mod huffman;
pub mod lexicons;
pub mod ner;
pub mod synth;
mod util;

pub use error::{Error, Result};
