//! Phrase assignment for embedding lookup and the dense embedding block.

use crate::corpus::{Vocabulary, PHRASE_SEPARATOR};
use crate::embedder::EmbeddingModel;

pub const DEFAULT_PHRASE_LEN: usize = 3;

fn lookup(tokens: &[String], vocab: &Vocabulary) -> Option<u32> {
    let sep = PHRASE_SEPARATOR.to_string();
    let key = tokens.join(&sep);
    vocab.id(&key).or_else(|| vocab.id(&key.to_lowercase()))
}

/// Greedy left-to-right phrase assignment preferring shorter phrases: at
/// each uncovered position the shortest in-vocabulary phrase of up to
/// `max_len` tokens starting there covers its tokens; tokens that start no
/// such phrase get `None`. Keys are tried as written, then lowercased.
pub fn assign_phrases(tokens: &[String], vocab: &Vocabulary, max_len: usize) -> Vec<Option<u32>> {
    let mut out = vec![None; tokens.len()];
    let mut i = 0;
    while i < tokens.len() {
        let found = (1..=max_len.min(tokens.len() - i)).find_map(|n| lookup(&tokens[i..i + n], vocab).map(|id| (n, id)));
        match found {
            Some((n, id)) => {
                out[i..i + n].fill(Some(id));
                i += n;
            }
            None => i += 1,
        }
    }
    out
}

/// `scale` times the phrase's embedding, or zeros for `None`.
pub fn embedding_block(phrase: Option<u32>, model: &EmbeddingModel, scale: f64) -> Vec<f64> {
    match phrase {
        Some(id) => model.leaf_vector(id).iter().map(|&x| scale * x as f64).collect(),
        None => vec![0.0; model.dim()],
    }
}
