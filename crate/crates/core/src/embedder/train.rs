//! Stochastic gradient ascent over generated training examples.
//!
//! With several workers the parameters live in one shared store of relaxed
//! atomics. Workers read, update and write rows without coordination, so
//! concurrent updates to the same row may be lost; that is the accepted
//! asynchronous-SGD contract. A single worker is bit-deterministic.

use std::sync::atomic::{AtomicU32, AtomicU64, Ordering};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{EmbeddingModel, LexiconIndex};
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::huffman::HuffmanTree;
use crate::lexicons::{sample_labels_into, LexLabel, LexiconSet, DEFAULT_NEG_RATE};

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub dim: usize,
    /// Context words on each side of the center (10 gives a 21-token window).
    pub window_radius: usize,
    pub epochs: usize,
    pub initial_lr: f32,
    pub min_lr: f32,
    /// Fraction of non-member lexicons sampled as negatives per position.
    pub neg_rate: f64,
    pub seed: u64,
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 50,
            window_radius: 10,
            epochs: 1,
            initial_lr: 0.025,
            min_lr: 1e-4,
            neg_rate: DEFAULT_NEG_RATE,
            seed: 1,
            workers: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_owned()));
        if self.dim == 0 {
            return bad("dim must be at least 1");
        }
        if self.window_radius == 0 {
            return bad("window radius must be at least 1");
        }
        if !(self.min_lr > 0.0 && self.min_lr <= self.initial_lr) {
            return bad("learning rates must satisfy 0 < min_lr <= initial_lr");
        }
        if !(0.0..=1.0).contains(&self.neg_rate) {
            return bad("neg_rate must lie in [0, 1]");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        Ok(())
    }
}

/// Target classifier of a training example.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Classifier {
    /// Inner node of the Huffman tree.
    Node(u32),
    Lexicon(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TrainingExample {
    /// Center word whose embedding is the classifier input.
    pub input: u32,
    pub classifier: Classifier,
    pub label: i8,
}

/// Appends the examples for one center position.
///
/// Every other word in `window` contributes one example per decision on
/// its tree path; the center word then contributes its sampled lexicon
/// labels.
pub fn gen_examples<R: Rng>(
    window: &[u32],
    center_index: usize,
    tree: &HuffmanTree,
    lexicons: &LexiconIndex,
    neg_rate: f64,
    rng: &mut R,
    out: &mut Vec<TrainingExample>,
) {
    let input = window[center_index];
    for (j, &ctx) in window.iter().enumerate() {
        if j == center_index {
            continue;
        }
        let path = tree.path(ctx);
        out.extend(path.nodes.iter().zip(path.labels).map(|(&n, &l)| TrainingExample {
            input,
            classifier: Classifier::Node(n),
            label: l,
        }));
    }
    if lexicons.lexicon_count() > 0 {
        let mut labels: Vec<LexLabel> = Vec::new();
        sample_labels_into(
            lexicons.memberships(input),
            lexicons.lexicon_count(),
            neg_rate,
            rng,
            &mut labels,
        );
        out.extend(labels.iter().map(|l| TrainingExample {
            input,
            classifier: Classifier::Lexicon(l.lexicon as u32),
            label: l.label,
        }));
    }
}

#[inline]
fn sigmoid32(x: f32) -> f32 {
    1.0 / (1.0 + (-x).exp())
}

#[inline]
fn dot32(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0.0f32; 8];
    let chunks = a.len() / 8 * 8;
    for (ca, cb) in a[..chunks].chunks_exact(8).zip(b[..chunks].chunks_exact(8)) {
        for k in 0..8 {
            acc[k] += ca[k] * cb[k];
        }
    }
    let mut s = acc.iter().sum::<f32>();
    for k in chunks..a.len() {
        s += a[k] * b[k];
    }
    s
}

/// One logistic ascent step on `log sigmoid(label * <w, e>)`, updating both
/// vectors from their pre-step values.
#[inline]
pub(crate) fn update_pair(w: &mut [f32], e: &mut [f32], label: i8, lr: f32) {
    let l = label as f32;
    let g = lr * l * sigmoid32(-l * dot32(w, e));
    for (wi, ei) in w.iter_mut().zip(e.iter_mut()) {
        let w0 = *wi;
        *wi += g * *ei;
        *ei += g * w0;
    }
}

/// Applies a single example to the model.
pub fn step(ex: &TrainingExample, model: &mut EmbeddingModel, lr: f32) {
    let d = model.dim;
    let e_range = ex.input as usize * d..(ex.input as usize + 1) * d;
    let (w_store, w_idx) = match ex.classifier {
        Classifier::Node(n) => (&mut model.node, n as usize),
        Classifier::Lexicon(s) => (&mut model.lex, s as usize),
    };
    let w = &mut w_store[w_idx * d..(w_idx + 1) * d];
    update_pair(w, &mut model.leaf[e_range], ex.label, lr);
}

/// Initializes a model over `vocab` and trains it on `sentences`.
pub fn train(
    vocab: Vocabulary,
    sentences: &[Vec<u32>],
    config: &TrainConfig,
    lexicons: Option<&LexiconSet>,
) -> Result<EmbeddingModel> {
    config.validate()?;
    let names = lexicons.map(|s| s.names().to_vec()).unwrap_or_default();
    let mut model = EmbeddingModel::new(vocab, names, config.dim, config.seed)?;
    train_existing(&mut model, sentences, config, lexicons)?;
    Ok(model)
}

/// Continues training an existing model. Lexicon names must match the
/// model's lexicon classifiers.
pub fn train_existing(
    model: &mut EmbeddingModel,
    sentences: &[Vec<u32>],
    config: &TrainConfig,
    lexicons: Option<&LexiconSet>,
) -> Result<()> {
    config.validate()?;
    let positions: u64 = sentences.iter().map(|s| s.len() as u64).sum();
    if positions == 0 {
        return Err(Error::Empty("training corpus has no tokens"));
    }
    let v = model.vocab.len();
    if let Some(&bad) = sentences.iter().flatten().find(|&&id| id as usize >= v) {
        return Err(Error::OutOfRange { id: bad as usize, len: v });
    }
    let index = match lexicons {
        Some(set) => {
            if set.names() != model.lexicon_names() {
                return Err(Error::InvalidArgument(
                    "lexicon names do not match the model's lexicon classifiers".into(),
                ));
            }
            model.lexicon_index(set)
        }
        None => LexiconIndex::empty(),
    };
    if config.epochs == 0 {
        return Ok(());
    }

    let store = SharedStore::from_model(model);
    let total = positions * config.epochs as u64;
    let progress = AtomicU64::new(0);
    let shards = shard(sentences, config.workers);
    let ctx = WorkerContext {
        store: &store,
        tree: &model.tree,
        lexicons: &index,
        config,
        total,
        progress: &progress,
    };
    if shards.len() == 1 {
        ctx.run(shards[0], 0);
    } else {
        std::thread::scope(|scope| {
            for (w, part) in shards.iter().enumerate() {
                let ctx = &ctx;
                scope.spawn(move || ctx.run(part, w as u64));
            }
        });
    }
    store.write_back(model);
    Ok(())
}

/// Splits sentences into at most `workers` contiguous runs of roughly equal
/// token count.
fn shard(sentences: &[Vec<u32>], workers: usize) -> Vec<&[Vec<u32>]> {
    let total: usize = sentences.iter().map(Vec::len).sum();
    let target = total.div_ceil(workers).max(1);
    let mut out = Vec::with_capacity(workers);
    let (mut start, mut acc) = (0, 0);
    for (i, s) in sentences.iter().enumerate() {
        acc += s.len();
        if acc >= target && out.len() + 1 < workers {
            out.push(&sentences[start..=i]);
            start = i + 1;
            acc = 0;
        }
    }
    if start < sentences.len() || out.is_empty() {
        out.push(&sentences[start..]);
    }
    out
}

struct SharedStore {
    dim: usize,
    leaf: Vec<AtomicU32>,
    node: Vec<AtomicU32>,
    lex: Vec<AtomicU32>,
}

fn to_atomic(v: &[f32]) -> Vec<AtomicU32> {
    v.iter().map(|x| AtomicU32::new(x.to_bits())).collect()
}

fn from_atomic(src: &[AtomicU32], dst: &mut [f32]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d = f32::from_bits(s.load(Ordering::Relaxed));
    }
}

impl SharedStore {
    fn from_model(m: &EmbeddingModel) -> Self {
        SharedStore {
            dim: m.dim,
            leaf: to_atomic(&m.leaf),
            node: to_atomic(&m.node),
            lex: to_atomic(&m.lex),
        }
    }

    fn write_back(&self, m: &mut EmbeddingModel) {
        from_atomic(&self.leaf, &mut m.leaf);
        from_atomic(&self.node, &mut m.node);
        from_atomic(&self.lex, &mut m.lex);
    }

    #[inline]
    fn row<'a>(&self, arr: &'a [AtomicU32], idx: usize) -> &'a [AtomicU32] {
        &arr[idx * self.dim..(idx + 1) * self.dim]
    }

    #[inline]
    fn load(row: &[AtomicU32], buf: &mut [f32]) {
        from_atomic(row, buf);
    }

    #[inline]
    fn store(row: &[AtomicU32], buf: &[f32]) {
        for (a, &x) in row.iter().zip(buf) {
            a.store(x.to_bits(), Ordering::Relaxed);
        }
    }
}

struct WorkerContext<'a> {
    store: &'a SharedStore,
    tree: &'a HuffmanTree,
    lexicons: &'a LexiconIndex,
    config: &'a TrainConfig,
    total: u64,
    progress: &'a AtomicU64,
}

const PROGRESS_BATCH: u64 = 10_000;

impl WorkerContext<'_> {
    fn run(&self, sentences: &[Vec<u32>], worker: u64) {
        let cfg = self.config;
        let d = self.store.dim;
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(worker);
        let mut examples = Vec::new();
        let mut center_buf = vec![0.0f32; d];
        let mut classifier_buf = vec![0.0f32; d];
        let mut unpublished = 0u64;
        let mut published = 0u64;
        let span = cfg.initial_lr - cfg.min_lr;

        for _ in 0..cfg.epochs {
            for sentence in sentences {
                let n = sentence.len();
                for center in 0..n {
                    let done = published + unpublished;
                    let lr = (cfg.initial_lr - span * (done as f64 / self.total as f64) as f32).max(cfg.min_lr);

                    let lo = center.saturating_sub(cfg.window_radius);
                    let hi = (center + cfg.window_radius + 1).min(n);
                    examples.clear();
                    gen_examples(&sentence[lo..hi], center - lo, self.tree, self.lexicons, cfg.neg_rate, &mut rng, &mut examples);

                    if !examples.is_empty() {
                        let center_row = self.store.row(&self.store.leaf, sentence[center] as usize);
                        SharedStore::load(center_row, &mut center_buf);
                        for ex in &examples {
                            let row = match ex.classifier {
                                Classifier::Node(i) => self.store.row(&self.store.node, i as usize),
                                Classifier::Lexicon(s) => self.store.row(&self.store.lex, s as usize),
                            };
                            SharedStore::load(row, &mut classifier_buf);
                            update_pair(&mut classifier_buf, &mut center_buf, ex.label, lr);
                            SharedStore::store(row, &classifier_buf);
                        }
                        SharedStore::store(center_row, &center_buf);
                    }

                    unpublished += 1;
                    if unpublished == PROGRESS_BATCH {
                        published = self.progress.fetch_add(unpublished, Ordering::Relaxed) + unpublished;
                        unpublished = 0;
                    }
                }
            }
        }
        self.progress.fetch_add(unpublished, Ordering::Relaxed);
    }
}

#[cfg(test)]
mod tests {
    use super::super::objective::{example_gradient, LexiconTerms};
    use super::super::test_support::*;
    use super::*;

    fn cfg(dim: usize, radius: usize, epochs: usize) -> TrainConfig {
        TrainConfig {
            dim,
            window_radius: radius,
            epochs,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn examples_on_balanced_tree() {
        let tree = HuffmanTree::from_counts(&[1, 1, 1, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut out = Vec::new();
        gen_examples(&[0, 1, 2], 1, &tree, &LexiconIndex::empty(), 0.0, &mut rng, &mut out);
        assert_eq!(out.len(), 4);
        assert!(out.iter().all(|e| e.input == 1));
        let p0 = tree.path(0);
        assert_eq!(out[0].classifier, Classifier::Node(p0.nodes[0]));
        assert_eq!(out[0].label, p0.labels[0]);

        out.clear();
        gen_examples(&[3], 0, &tree, &LexiconIndex::empty(), 0.0, &mut rng, &mut out);
        assert!(out.is_empty());
    }

    #[test]
    fn examples_include_lexicon_labels() {
        let tree = HuffmanTree::from_counts(&[1, 1, 1, 1]).unwrap();
        let index = LexiconIndex::from_memberships(vec![vec![], vec![0], vec![], vec![]], 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut out = Vec::new();
        gen_examples(&[0, 1, 2], 1, &tree, &index, 1.0, &mut rng, &mut out);
        assert_eq!(out.len(), 6);
        assert_eq!(
            &out[4..],
            &[
                TrainingExample { input: 1, classifier: Classifier::Lexicon(0), label: 1 },
                TrainingExample { input: 1, classifier: Classifier::Lexicon(1), label: -1 },
            ]
        );
    }

    #[test]
    fn step_from_zero_classifier() {
        let mut m = EmbeddingModel::new(vocab(4), vec![], 3, 1).unwrap();
        let e_before = m.leaf_vector(2).to_vec();
        let ex = TrainingExample { input: 2, classifier: Classifier::Node(0), label: -1 };
        step(&ex, &mut m, 0.1);
        assert_eq!(m.leaf_vector(2), &e_before[..]);
        for (got, e) in m.node_vector(0).iter().zip(&e_before) {
            assert!((got - (-0.05 * e)).abs() < 1e-9);
        }
    }

    #[test]
    fn step_saturates() {
        let mut m = EmbeddingModel::new(vocab(4), vec![], 2, 1).unwrap();
        m.node_vector_mut(0).copy_from_slice(&[50.0, 50.0]);
        m.leaf_vector_mut(0).copy_from_slice(&[50.0, 50.0]);
        let before = (m.node_vector(0).to_vec(), m.leaf_vector(0).to_vec());
        step(&TrainingExample { input: 0, classifier: Classifier::Node(0), label: 1 }, &mut m, 0.1);
        assert_eq!(before, (m.node_vector(0).to_vec(), m.leaf_vector(0).to_vec()));
    }

    #[test]
    fn step_follows_the_analytic_gradient() {
        let mut m = EmbeddingModel::new(vocab(4), vec!["x".into()], 5, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        m.lex_vector_mut(0).iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        m.leaf_vector_mut(1).iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        let w: Vec<f64> = m.lex_vector(0).iter().map(|&x| x as f64).collect();
        let e: Vec<f64> = m.leaf_vector(1).iter().map(|&x| x as f64).collect();
        let (gw, ge) = example_gradient(&w, &e, -1);
        let lr = 1e-3;
        step(&TrainingExample { input: 1, classifier: Classifier::Lexicon(0), label: -1 }, &mut m, lr);
        for k in 0..5 {
            let dw = (m.lex_vector(0)[k] as f64 - w[k]) / lr as f64;
            let de = (m.leaf_vector(1)[k] as f64 - e[k]) / lr as f64;
            assert!((dw - gw[k]).abs() < 1e-3, "{dw} vs {}", gw[k]);
            assert!((de - ge[k]).abs() < 1e-3, "{de} vs {}", ge[k]);
        }
    }

    #[test]
    fn zero_epochs_leaves_initialization() {
        let v = vocab(6);
        let init = EmbeddingModel::new(v.clone(), vec![], 4, 9).unwrap();
        let trained = train(v, &[vec![0, 1, 2, 3, 4, 5]], &TrainConfig { seed: 9, epochs: 0, ..cfg(4, 2, 0) }, None).unwrap();
        assert_eq!(init, trained);
    }

    #[test]
    fn empty_corpus_and_bad_ids_rejected() {
        assert!(matches!(train(vocab(3), &[vec![]], &cfg(4, 2, 1), None), Err(Error::Empty(_))));
        assert!(matches!(train(vocab(3), &[vec![7]], &cfg(4, 2, 1), None), Err(Error::OutOfRange { .. })));
    }

    fn toy_corpus(seed: u64, tokens: usize) -> Vec<Vec<u32>> {
        // two topics over 8 words: {0..4} and {4..8}
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        let mut produced = 0;
        while produced < tokens {
            let base = if rng.gen_bool(0.5) { 0 } else { 4 };
            let s: Vec<u32> = (0..10).map(|_| base + rng.gen_range(0..4)).collect();
            produced += s.len();
            out.push(s);
        }
        out
    }

    #[test]
    fn training_improves_likelihood() {
        let corpus = toy_corpus(1, 10_000);
        let keys = corpus.iter().flatten().map(|i| format!("w{i}"));
        let v = crate::corpus::build_vocab(keys, 100, 1).unwrap();
        // remap ids through the vocabulary
        let ids: Vec<Vec<u32>> = corpus
            .iter()
            .map(|s| s.iter().map(|i| v.id(&format!("w{i}")).unwrap()).collect())
            .collect();
        let config = TrainConfig { epochs: 5, ..cfg(10, 3, 5) };
        let init = EmbeddingModel::new(v.clone(), vec![], 10, config.seed).unwrap();
        let trained = train(v, &ids, &config, None).unwrap();
        let before = init.log_likelihood(&ids, 3, LexiconTerms::None);
        let after = trained.log_likelihood(&ids, 3, LexiconTerms::None);
        assert!(after > before, "{after} <= {before}");
    }

    #[test]
    fn single_worker_is_deterministic_and_multi_worker_learns() {
        let corpus = toy_corpus(2, 5_000);
        let v = uniform_vocab(8);
        let config = cfg(8, 3, 2);
        let a = train(v.clone(), &corpus, &config, None).unwrap();
        let b = train(v.clone(), &corpus, &config, None).unwrap();
        assert_eq!(a, b);

        let multi = train(v.clone(), &corpus, &TrainConfig { workers: 3, ..config.clone() }, None).unwrap();
        let init = EmbeddingModel::new(v, vec![], 8, config.seed).unwrap();
        assert!(
            multi.log_likelihood(&corpus, 3, LexiconTerms::None) > init.log_likelihood(&corpus, 3, LexiconTerms::None)
        );
    }

    #[test]
    fn shards_cover_corpus_in_order() {
        let corpus: Vec<Vec<u32>> = (0..17).map(|i| vec![0; i % 5 + 1]).collect();
        for w in 1..6 {
            let parts = shard(&corpus, w);
            assert!(parts.len() <= w);
            let joined: Vec<&Vec<u32>> = parts.iter().flat_map(|p| p.iter()).collect();
            assert_eq!(joined.len(), corpus.len());
        }
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig { window_radius: 0, ..TrainConfig::default() }.validate().is_err());
        assert!(TrainConfig { min_lr: 0.1, ..TrainConfig::default() }.validate().is_err());
        assert!(TrainConfig { neg_rate: 1.5, ..TrainConfig::default() }.validate().is_err());
        assert!(TrainConfig::default().validate().is_ok());
    }
}
