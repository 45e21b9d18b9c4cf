//! Training objective in double precision: the skip-gram log-likelihood,
//! its lexicon-infused extension, and their exact gradients.
//!
//! For each center position the likelihood multiplies, over every context
//! word within the window, the sigmoid of each signed decision on the
//! context word's tree path; lexicon terms add one signed sigmoid per
//! lexicon label of the center word.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::LexiconIndex;
use crate::huffman::HuffmanTree;
use crate::lexicons::{sample_labels_into, LexLabel};
use crate::util::{log_sigmoid, sigmoid};

/// Borrowed parameter view: row-major `V x dim` leaves, `(V-1) x dim`
/// inner-node classifiers and `K x dim` lexicon classifiers.
#[derive(Clone, Copy, Debug)]
pub struct Params<'a> {
    pub dim: usize,
    pub leaf: &'a [f64],
    pub node: &'a [f64],
    pub lex: &'a [f64],
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gradient {
    pub leaf: Vec<f64>,
    pub node: Vec<f64>,
    pub lex: Vec<f64>,
}

/// Which lexicon terms enter the likelihood.
#[derive(Clone, Copy, Debug)]
pub enum LexiconTerms<'a> {
    /// Plain skip-gram likelihood.
    None,
    /// Every lexicon contributes a term for every center word.
    All(&'a LexiconIndex),
    /// Negative terms subsampled at `neg_rate` with a fixed seed.
    Sampled {
        index: &'a LexiconIndex,
        neg_rate: f64,
        seed: u64,
    },
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `log sigmoid(label * <w, e>)` for one decision.
pub fn example_log_likelihood(w: &[f64], e: &[f64], label: i8) -> f64 {
    log_sigmoid(label as f64 * dot(w, e))
}

/// Gradient of [`example_log_likelihood`] with respect to `(w, e)`.
pub fn example_gradient(w: &[f64], e: &[f64], label: i8) -> (Vec<f64>, Vec<f64>) {
    let l = label as f64;
    let g = l * sigmoid(-l * dot(w, e));
    (e.iter().map(|x| g * x).collect(), w.iter().map(|x| g * x).collect())
}

pub fn log_likelihood(
    params: &Params<'_>,
    tree: &HuffmanTree,
    sentences: &[Vec<u32>],
    window_radius: usize,
    lexicons: &LexiconTerms<'_>,
) -> f64 {
    evaluate(params, tree, sentences, window_radius, lexicons, None)
}

/// Log-likelihood and its gradient with respect to every parameter.
pub fn gradient(
    params: &Params<'_>,
    tree: &HuffmanTree,
    sentences: &[Vec<u32>],
    window_radius: usize,
    lexicons: &LexiconTerms<'_>,
) -> (f64, Gradient) {
    let mut grad = Gradient {
        leaf: vec![0.0; params.leaf.len()],
        node: vec![0.0; params.node.len()],
        lex: vec![0.0; params.lex.len()],
    };
    let ll = evaluate(params, tree, sentences, window_radius, lexicons, Some(&mut grad));
    (ll, grad)
}

fn evaluate(
    params: &Params<'_>,
    tree: &HuffmanTree,
    sentences: &[Vec<u32>],
    window_radius: usize,
    lexicons: &LexiconTerms<'_>,
    mut grad: Option<&mut Gradient>,
) -> f64 {
    let d = params.dim;
    let mut rng = match lexicons {
        LexiconTerms::Sampled { seed, .. } => Some(ChaCha8Rng::seed_from_u64(*seed)),
        _ => None,
    };
    let mut labels: Vec<LexLabel> = Vec::new();
    let mut total = 0.0;

    for sentence in sentences {
        let n = sentence.len();
        for center in 0..n {
            let c = sentence[center] as usize;
            let lo = center.saturating_sub(window_radius);
            let hi = (center + window_radius + 1).min(n);
            for (j, &ctx) in sentence[lo..hi].iter().enumerate() {
                if lo + j == center {
                    continue;
                }
                let path = tree.path(ctx);
                for (&inner, &label) in path.nodes.iter().zip(path.labels) {
                    let r = inner as usize * d..(inner as usize + 1) * d;
                    let g = grad
                        .as_deref_mut()
                        .map(|g| (&mut g.node[r.clone()], &mut g.leaf[c * d..(c + 1) * d]));
                    total += accumulate(&params.node[r], &params.leaf[c * d..(c + 1) * d], label, g);
                }
            }

            let (index, rate) = match lexicons {
                LexiconTerms::None => continue,
                LexiconTerms::All(index) => (*index, 1.0),
                LexiconTerms::Sampled { index, neg_rate, .. } => (*index, *neg_rate),
            };
            labels.clear();
            // rate 1 consumes no draws, so the unseeded fallback is never read
            let rng = rng.get_or_insert_with(|| ChaCha8Rng::seed_from_u64(0));
            sample_labels_into(index.memberships(c as u32), index.lexicon_count(), rate, rng, &mut labels);
            for lab in &labels {
                let r = lab.lexicon * d..(lab.lexicon + 1) * d;
                let g = grad
                    .as_deref_mut()
                    .map(|g| (&mut g.lex[r.clone()], &mut g.leaf[c * d..(c + 1) * d]));
                total += accumulate(&params.lex[r], &params.leaf[c * d..(c + 1) * d], lab.label, g);
            }
        }
    }
    total
}

/// Adds one decision's log-likelihood, accumulating its gradient into
/// `(classifier, embedding)` when requested.
fn accumulate(w: &[f64], e: &[f64], label: i8, grads: Option<(&mut [f64], &mut [f64])>) -> f64 {
    let l = label as f64;
    let x = l * dot(w, e);
    if let Some((gw, ge)) = grads {
        let g = l * sigmoid(-x);
        for k in 0..w.len() {
            gw[k] += g * e[k];
            ge[k] += g * w[k];
        }
    }
    log_sigmoid(x)
}
