//! Skip-gram phrase embeddings with hierarchical softmax, optionally
//! infused with lexicon-membership supervision.
//!
//! The model holds one embedding per vocabulary entry (the leaf vectors),
//! one logistic classifier per inner node of the Huffman tree and one
//! classifier per lexicon. A context word is predicted from the center
//! word's embedding through the decisions on its tree path; with lexicons,
//! the center embedding also predicts membership in each lexicon.

mod io;
pub mod objective;
mod query;
mod train;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::huffman::HuffmanTree;
use crate::lexicons::LexiconSet;

pub use io::{sidecar_path, STATE_FORMAT_VERSION};
pub use objective::{LexiconTerms, Params};
pub use query::{
    analogy_query, context_prob, eval_analogy, nearest, AnalogyAnswer, AnalogyReport,
    AnalogySearcher, SkipReason, DEFAULT_ANALOGY_RESTRICT,
};
pub use train::{
    gen_examples, step, train, train_existing, Classifier, TrainConfig, TrainingExample,
};

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingModel {
    dim: usize,
    vocab: Vocabulary,
    tree: HuffmanTree,
    lexicon_names: Vec<String>,
    leaf: Vec<f32>,
    node: Vec<f32>,
    lex: Vec<f32>,
}

impl EmbeddingModel {
    /// Creates a freshly initialized model: leaf vectors uniform in
    /// `[-0.5/dim, 0.5/dim]`, classifier vectors zero.
    pub fn new(vocab: Vocabulary, lexicon_names: Vec<String>, dim: usize, seed: u64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("dim must be at least 1".into()));
        }
        let tree = HuffmanTree::from_vocab(&vocab)?;
        let v = vocab.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::MAX);
        let half = 0.5 / dim as f32;
        let leaf = (0..v * dim).map(|_| rng.gen_range(-half..=half)).collect();
        let k = lexicon_names.len();
        Ok(EmbeddingModel {
            dim,
            vocab,
            tree,
            lexicon_names,
            leaf,
            node: vec![0.0; (v - 1) * dim],
            lex: vec![0.0; k * dim],
        })
    }

    /// Assembles a model from explicit parameters. Classifier vectors
    /// default to zero when `node`/`lex` are `None`.
    pub fn from_parts(
        vocab: Vocabulary,
        lexicon_names: Vec<String>,
        dim: usize,
        leaf: Vec<f32>,
        node: Option<Vec<f32>>,
        lex: Option<Vec<f32>>,
    ) -> Result<Self> {
        let tree = HuffmanTree::from_vocab(&vocab)?;
        let v = vocab.len();
        let k = lexicon_names.len();
        let node = node.unwrap_or_else(|| vec![0.0; (v - 1) * dim]);
        let lex = lex.unwrap_or_else(|| vec![0.0; k * dim]);
        for (expected, found) in [(v * dim, leaf.len()), ((v - 1) * dim, node.len()), (k * dim, lex.len())] {
            if expected != found {
                return Err(Error::DimensionMismatch { expected, found });
            }
        }
        Ok(EmbeddingModel {
            dim,
            vocab,
            tree,
            lexicon_names,
            leaf,
            node,
            lex,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn tree(&self) -> &HuffmanTree {
        &self.tree
    }

    pub fn lexicon_names(&self) -> &[String] {
        &self.lexicon_names
    }

    pub fn lexicon_count(&self) -> usize {
        self.lexicon_names.len()
    }

    pub fn leaf_vector(&self, id: u32) -> &[f32] {
        let s = id as usize * self.dim;
        &self.leaf[s..s + self.dim]
    }

    pub fn leaf_vector_mut(&mut self, id: u32) -> &mut [f32] {
        let s = id as usize * self.dim;
        &mut self.leaf[s..s + self.dim]
    }

    pub fn node_vector(&self, inner: u32) -> &[f32] {
        let s = inner as usize * self.dim;
        &self.node[s..s + self.dim]
    }

    pub fn node_vector_mut(&mut self, inner: u32) -> &mut [f32] {
        let s = inner as usize * self.dim;
        &mut self.node[s..s + self.dim]
    }

    pub fn lex_vector(&self, lexicon: u32) -> &[f32] {
        let s = lexicon as usize * self.dim;
        &self.lex[s..s + self.dim]
    }

    pub fn lex_vector_mut(&mut self, lexicon: u32) -> &mut [f32] {
        let s = lexicon as usize * self.dim;
        &mut self.lex[s..s + self.dim]
    }

    pub fn leaf_vectors(&self) -> &[f32] {
        &self.leaf
    }

    pub fn node_vectors(&self) -> &[f32] {
        &self.node
    }

    pub fn lex_vectors(&self) -> &[f32] {
        &self.lex
    }

    /// Per-vocabulary-id lexicon memberships, looked up by lowercased key.
    pub fn lexicon_index(&self, set: &LexiconSet) -> LexiconIndex {
        LexiconIndex::new(&self.vocab, set)
    }

    /// Log-likelihood of `sentences` under the model, in f64.
    ///
    /// `lexicons` selects which lexicon terms enter: none (skip-gram
    /// likelihood), all `K` terms, or a seeded negative subsample.
    pub fn log_likelihood(&self, sentences: &[Vec<u32>], window_radius: usize, lexicons: LexiconTerms<'_>) -> f64 {
        let leaf: Vec<f64> = self.leaf.iter().map(|&x| x as f64).collect();
        let node: Vec<f64> = self.node.iter().map(|&x| x as f64).collect();
        let lex: Vec<f64> = self.lex.iter().map(|&x| x as f64).collect();
        let params = Params {
            dim: self.dim,
            leaf: &leaf,
            node: &node,
            lex: &lex,
        };
        objective::log_likelihood(&params, &self.tree, sentences, window_radius, &lexicons)
    }
}

/// Lexicon memberships resolved against vocabulary ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LexiconIndex {
    memberships: Vec<Vec<usize>>,
    lexicon_count: usize,
}

impl LexiconIndex {
    pub fn new(vocab: &Vocabulary, set: &LexiconSet) -> Self {
        let memberships = vocab
            .iter()
            .map(|(key, _)| set.memberships(&key.to_lowercase()).to_vec())
            .collect();
        LexiconIndex {
            memberships,
            lexicon_count: set.len(),
        }
    }

    /// Direct construction from per-id membership lists.
    pub fn from_memberships(memberships: Vec<Vec<usize>>, lexicon_count: usize) -> Self {
        LexiconIndex {
            memberships,
            lexicon_count,
        }
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn lexicon_count(&self) -> usize {
        self.lexicon_count
    }

    pub fn memberships(&self, id: u32) -> &[usize] {
        self.memberships.get(id as usize).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Cosine similarity in f64; 0 when either vector has zero norm.
pub fn cosine(a: &[f32], b: &[f32]) -> f64 {
    let (mut dot, mut na, mut nb) = (0.0f64, 0.0f64, 0.0f64);
    for (&x, &y) in a.iter().zip(b) {
        let (x, y) = (x as f64, y as f64);
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na.sqrt() * nb.sqrt())
    }
}

/// Mean cosine similarity over all unordered pairs of `ids`; 0 with fewer
/// than two ids.
pub fn mean_pairwise_cosine(model: &EmbeddingModel, ids: &[u32]) -> f64 {
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            sum += cosine(model.leaf_vector(a), model.leaf_vector(b));
            pairs += 1;
        }
    }
    if pairs == 0 {
        0.0
    } else {
        sum / pairs as f64
    }
}
