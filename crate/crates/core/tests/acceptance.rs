//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). Set `LEXEMB_ACCEPTANCE` to a
//! comma-separated list of criterion numbers to run a subset. The process
//! exits non-zero when any selected criterion fails.

use std::collections::{BTreeMap, HashMap};
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lexemb::corpus::{build_vocab, Vocabulary};
use lexemb::crf::{
    decode_bilou, encode_bilou, forward_backward, log_partition, seq_loglik_grad, train_crf, train_stacked, viterbi,
    CrfModel, CrfTrainConfig, FeatureAlphabet, LabelAlphabet, RawSequence, RdaState, Scores, SequenceInstance, Span,
    StackedConfig, Token,
};
use lexemb::embedder::objective::{gradient, log_likelihood, Params};
use lexemb::embedder::{context_prob, mean_pairwise_cosine, train, EmbeddingModel, LexiconIndex, LexiconTerms, TrainConfig};
use lexemb::huffman::HuffmanTree;
use lexemb::lexicons::LexiconSet;
use lexemb::ner::{grid_search, score_spans, train_ner, Document, GridConfig, NerModel, NerTrainConfig, Resources};
use lexemb::synth::{toy_ner, two_class_corpus, zipf_corpus, ToyNerConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

// ---------------------------------------------------------------- 1

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for _ in 0..50 {
        let v = rng.gen_range(2..=16usize);
        let k = rng.gen_range(0..=4usize);
        let d = rng.gen_range(1..=8usize);
        let counts: Vec<u64> = (0..v).map(|_| rng.gen_range(1..50)).collect();
        let tree = HuffmanTree::from_counts(&counts).unwrap();
        let memberships: Vec<Vec<usize>> = (0..v).map(|_| (0..k).filter(|_| rng.gen_bool(0.4)).collect()).collect();
        let index = LexiconIndex::from_memberships(memberships, k);
        let sentences: Vec<Vec<u32>> = (0..4)
            .map(|_| (0..rng.gen_range(2..8)).map(|_| rng.gen_range(0..v as u32)).collect())
            .collect();
        let radius = rng.gen_range(1..=3);
        let mut theta: Vec<f64> = (0..(2 * v - 1 + k) * d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let split = |t: &[f64]| -> (Vec<f64>, Vec<f64>, Vec<f64>) {
            (t[..v * d].to_vec(), t[v * d..(2 * v - 1) * d].to_vec(), t[(2 * v - 1) * d..].to_vec())
        };
        for terms in [LexiconTerms::None, LexiconTerms::All(&index)] {
            let ll_at = |t: &[f64]| {
                let (leaf, node, lex) = split(t);
                log_likelihood(&Params { dim: d, leaf: &leaf, node: &node, lex: &lex }, &tree, &sentences, radius, &terms)
            };
            let (leaf, node, lex) = split(&theta);
            let (ll, g) = gradient(&Params { dim: d, leaf: &leaf, node: &node, lex: &lex }, &tree, &sentences, radius, &terms);
            if (ll - ll_at(&theta)).abs() > 1e-12 * ll.abs().max(1.0) {
                return outcome(false, "gradient() and log_likelihood() disagree on the value");
            }
            let analytic: Vec<f64> = g.leaf.iter().chain(&g.node).chain(&g.lex).copied().collect();
            for i in 0..theta.len() {
                let orig = theta[i];
                theta[i] = orig + h;
                let up = ll_at(&theta);
                theta[i] = orig - h;
                let down = ll_at(&theta);
                theta[i] = orig;
                let fd = (up - down) / (2.0 * h);
                worst = worst.max(rel_err(analytic[i], fd, 1e-6));
                checked += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst < 1e-4 && elapsed < Duration::from_secs(10),
        format!("50 models x (Eq.1, Eq.2), {checked} coordinates, max rel err {worst:.2e}, {}", secs(elapsed)),
    )
}

// ---------------------------------------------------------------- 2

fn random_vocab(v: usize, rng: &mut ChaCha8Rng) -> Vocabulary {
    let counts: HashMap<String, u64> = (0..v).map(|i| (format!("w{i}"), rng.gen_range(1..1000))).collect();
    Vocabulary::from_counts(counts, 0, v, 1).unwrap()
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(202);
    let mut worst: f64 = 0.0;
    let mut sums = 0;
    for v in 2..=64usize {
        for _ in 0..2 {
            let d = rng.gen_range(1..=10);
            let vocab = random_vocab(v, &mut rng);
            let leaf: Vec<f32> = (0..v * d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let node: Vec<f32> = (0..(v - 1) * d).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let model = EmbeddingModel::from_parts(vocab, vec![], d, leaf, Some(node), Some(vec![])).unwrap();
            for target in 0..v as u32 {
                let total: f64 = (0..v as u32).map(|c| context_prob(&model, target, c).unwrap()).sum();
                worst = worst.max((total - 1.0).abs());
                sums += 1;
            }
        }
    }
    outcome(worst <= 1e-9, format!("{sums} distributions over V = 2..=64, max |sum - 1| = {worst:.2e}"))
}

// ---------------------------------------------------------------- 3

/// Minimum weighted external path length over all full binary trees whose
/// leaves carry `weights`: every such tree splits its leaf multiset at the
/// root, and each internal node adds the weight of the leaves below it.
fn brute_min_cost(weights: &[u64], memo: &mut HashMap<Vec<u64>, u64>) -> u64 {
    if weights.len() == 1 {
        return 0;
    }
    if let Some(&c) = memo.get(weights) {
        return c;
    }
    let n = weights.len();
    let total: u64 = weights.iter().sum();
    let mut best = u64::MAX;
    // element 0 always goes left, so each split is visited once
    for mask in 0..(1u32 << (n - 1)) {
        let mut left = vec![weights[0]];
        let mut right = Vec::new();
        for (i, &w) in weights.iter().enumerate().skip(1) {
            if mask >> (i - 1) & 1 == 1 {
                left.push(w);
            } else {
                right.push(w);
            }
        }
        if right.is_empty() {
            continue;
        }
        let cost = brute_min_cost(&left, memo) + brute_min_cost(&right, memo);
        best = best.min(cost);
    }
    let best = best + total;
    memo.insert(weights.to_vec(), best);
    best
}

fn multisets(len: usize, values: &[u64], min_index: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    for i in min_index..values.len() {
        cur.push(values[i]);
        multisets(len, values, i, cur, out);
        cur.pop();
    }
}

fn criterion_3() -> Outcome {
    let values = [1u64, 2, 3, 4, 5, 7, 11];
    let mut cases = Vec::new();
    for v in 2..=8 {
        multisets(v, &values, 0, &mut Vec::new(), &mut cases);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(303);
    for _ in 0..500 {
        let v = rng.gen_range(2..=8);
        cases.push((0..v).map(|_| rng.gen_range(1..10_000)).collect());
    }
    let mut memo = HashMap::new();
    let mut mismatches = 0;
    for counts in &cases {
        let mut shuffled = counts.clone();
        shuffled.shuffle(&mut rng);
        let tree = HuffmanTree::from_counts(&shuffled).unwrap();
        let mut sorted = counts.clone();
        sorted.sort_unstable();
        if tree.weighted_length(&shuffled) != brute_min_cost(&sorted, &mut memo) {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("{} multisets (all over {{1,2,3,4,5,7,11}} plus 500 random), {mismatches} mismatches", cases.len()),
    )
}

// ---------------------------------------------------------------- 4

/// All label sequences of length `t` over `l` labels, lexicographic.
fn all_sequences(t: usize, l: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..t {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..l).map(move |y| {
                    let mut q = p.clone();
                    q.push(y);
                    q
                })
            })
            .collect();
    }
    out
}

fn enumerate_score(unary: &[f64], trans: &[f64], l: usize, y: &[usize]) -> f64 {
    let mut s = 0.0;
    for (t, &label) in y.iter().enumerate() {
        s += unary[t * l + label];
        if t > 0 {
            s += trans[y[t - 1] * l + label];
        }
    }
    s
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    let mut worst: f64 = 0.0;
    let mut viterbi_errors = 0;
    for model in 0..100 {
        let l = 1 + model % 5;
        let t = rng.gen_range(1..=6);
        let unary: Vec<f64> = (0..t * l).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let trans: Vec<f64> = (0..l * l).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let scores = Scores::new(l, unary.clone(), trans.clone());

        let seqs = all_sequences(t, l);
        let raw: Vec<f64> = seqs.iter().map(|y| enumerate_score(&unary, &trans, l, y)).collect();
        let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = raw.iter().map(|s| (s - max).exp()).sum();
        let log_z = max + z.ln();
        let mut node = vec![0.0; t * l];
        let mut edge = vec![0.0; l * l];
        for (y, s) in seqs.iter().zip(&raw) {
            let p = (s - log_z).exp();
            for (pos, &label) in y.iter().enumerate() {
                node[pos * l + label] += p;
                if pos > 0 {
                    edge[y[pos - 1] * l + label] += p;
                }
            }
        }
        // first maximum in lexicographic order = lowest-index tie break
        let best = raw.iter().enumerate().fold(0, |b, (i, &s)| if s > raw[b] { i } else { b });

        let m = forward_backward(&scores);
        worst = worst.max(rel_err(log_partition(&scores), log_z, 1e-300));
        worst = worst.max(rel_err(m.log_z, log_z, 1e-300));
        for (a, b) in m.node.iter().zip(&node).chain(m.edge.iter().zip(&edge)) {
            worst = worst.max(rel_err(*a, *b, 1e-300));
        }
        if viterbi(&scores) != seqs[best] {
            viterbi_errors += 1;
        }
    }

    // the same check through the model's weight layout and log-likelihood
    let types = ["PER"];
    let labels = LabelAlphabet::new(&types).unwrap();
    let l = labels.len();
    let features = FeatureAlphabet::from_names((0..6).map(|i| format!("f{i}")).collect()).unwrap();
    let dense_dim = 2;
    let mut ll_models = 0;
    for _ in 0..20 {
        let t = rng.gen_range(1..=6);
        let weights: Vec<f64> = (0..(6 + dense_dim + l) * l).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let model = CrfModel::from_weights(labels.clone(), features.clone(), dense_dim, weights.clone()).unwrap();
        let tokens: Vec<Token> = (0..t)
            .map(|i| {
                let mut f: Vec<u32> = (0..6).filter(|_| rng.gen_bool(0.4)).collect();
                f.dedup();
                Token { form: format!("x{i}"), features: f, dense: (0..dense_dim).map(|_| rng.gen_range(-1.0..1.0)).collect() }
            })
            .collect();
        let gold: Vec<usize> = (0..t).map(|_| rng.gen_range(0..l)).collect();
        // layout: [features x L | dense x L | L x L]
        let mut unary = vec![0.0; t * l];
        for (pos, tok) in tokens.iter().enumerate() {
            for y in 0..l {
                let mut s: f64 = tok.features.iter().map(|&f| weights[f as usize * l + y]).sum();
                s += tok.dense.iter().enumerate().map(|(k, x)| x * weights[(6 + k) * l + y]).sum::<f64>();
                unary[pos * l + y] = s;
            }
        }
        let trans = weights[(6 + dense_dim) * l..].to_vec();
        let raw: Vec<f64> = all_sequences(t, l).iter().map(|y| enumerate_score(&unary, &trans, l, y)).collect();
        let max = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = max + raw.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
        let expected = enumerate_score(&unary, &trans, l, &gold) - log_z;
        let inst = SequenceInstance { tokens, gold: Some(gold) };
        let (ll, _) = seq_loglik_grad(&model, &inst);
        worst = worst.max(rel_err(ll, expected, 1e-300));
        ll_models += 1;
    }
    outcome(
        worst < 1e-8 && viterbi_errors == 0,
        format!(
            "100 score models (T<=6, L<=5) + {ll_models} weight-level models, max rel err {worst:.2e}, {viterbi_errors} Viterbi mismatches"
        ),
    )
}

// ---------------------------------------------------------------- 5

fn criterion_5() -> Outcome {
    // hand example: t=1, ḡ=1, G=1, η=0.1, λ1=0.5, λ2=0 → w = −0.05
    let from_step = {
        let mut s = RdaState::new(1, 0.1, 0.5, 0.0).unwrap();
        s.step(&[(0, 1.0)]);
        s.weights()[0]
    };
    let from_parts = RdaState::from_parts(vec![1.0], vec![1.0], 1, 0.1, 0.5, 0.0).unwrap().weights()[0];
    let hand_ok = from_step == -0.05 && from_parts == -0.05;

    let mut rng = ChaCha8Rng::seed_from_u64(505);
    let mut zero_violations = 0;
    let mut nonzero_violations = 0;
    let mut below = 0;
    for _ in 0..200 {
        let dim = 20;
        let l1 = rng.gen_range(0.0..0.5);
        let mut s = RdaState::new(dim, rng.gen_range(0.01..1.0), l1, rng.gen_range(0.0..0.1)).unwrap();
        let steps = rng.gen_range(1..20);
        for _ in 0..steps {
            let mut g = Vec::new();
            for i in 0..dim {
                if rng.gen_bool(0.5) {
                    g.push((i, rng.gen_range(-1.0..1.0)));
                }
            }
            s.step(&g);
        }
        let w = s.weights();
        for (&wi, &sum) in w.iter().zip(s.grad_sum()) {
            let mean = sum / s.steps() as f64;
            if mean.abs() <= l1 {
                below += 1;
                if wi.to_bits() != 0.0f64.to_bits() {
                    zero_violations += 1;
                }
            } else if wi == 0.0 || wi.signum() == mean.signum() {
                nonzero_violations += 1;
            }
        }
    }
    outcome(
        hand_ok && zero_violations == 0 && nonzero_violations == 0,
        format!(
            "hand example w = {from_step} (step) / {from_parts} (from sums); {below} coordinates under λ1, {zero_violations} not exactly +0.0"
        ),
    )
}

// ---------------------------------------------------------------- 6

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut wins = 0;
    let mut rows = Vec::new();
    for seed in 0..10u64 {
        let c = two_class_corpus(1_000_000, 20, seed);
        let vocab = build_vocab(c.sentences.iter().flatten(), usize::MAX, 1).unwrap();
        let ids: Vec<Vec<u32>> = c.sentences.iter().map(|s| s.iter().map(|t| vocab.id(t).unwrap()).collect()).collect();
        let class_a: Vec<u32> = c.class_a.iter().map(|w| vocab.id(w).unwrap()).collect();
        let lexicon = LexiconSet::from_entries([("class_a", c.class_a.clone())]).unwrap();
        let cfg = TrainConfig { dim: 20, window_radius: 2, seed, ..TrainConfig::default() };
        let standard = mean_pairwise_cosine(&train(vocab.clone(), &ids, &cfg, None).unwrap(), &class_a);
        let infused = mean_pairwise_cosine(&train(vocab, &ids, &cfg, Some(&lexicon)).unwrap(), &class_a);
        if infused > standard {
            wins += 1;
        }
        rows.push(format!("{standard:.3}->{infused:.3}"));
    }
    let elapsed = start.elapsed();
    outcome(
        wins >= 9 && elapsed < Duration::from_secs(600),
        format!("infused > standard in {wins}/10 seeds [{}], {}", rows.join(" "), secs(elapsed)),
    )
}

// ---------------------------------------------------------------- 7

fn test_f1(model: &NerModel, docs: &[Document], res: &Resources) -> f64 {
    let gold: Vec<Vec<Span>> = docs.iter().flat_map(|d| d.sentences.iter().map(|s| s.spans.clone())).collect();
    let pred: Vec<Vec<Span>> = model.tag_all(docs, res).unwrap().into_iter().flatten().collect();
    score_spans(&gold, &pred).unwrap().overall.f1
}

fn toy_embeddings(unlabeled: &[Vec<String>], lexicons: &[(String, Vec<String>)], seed: u64) -> EmbeddingModel {
    let vocab = build_vocab(unlabeled.iter().flatten(), usize::MAX, 1).unwrap();
    let ids: Vec<Vec<u32>> = unlabeled.iter().map(|s| s.iter().map(|t| vocab.id(t).unwrap()).collect()).collect();
    let lex = LexiconSet::from_entries(lexicons.iter().map(|(n, v)| (n.clone(), v.clone()))).unwrap();
    let cfg = TrainConfig { dim: 20, window_radius: 3, epochs: 5, seed, ..TrainConfig::default() };
    train(vocab, &ids, &cfg, Some(&lex)).unwrap()
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let toy = toy_ner(&ToyNerConfig::default(), 0);
    let tokens: usize = toy.train.iter().chain(&toy.dev).chain(&toy.test).map(Document::token_count).sum();
    let config = NerTrainConfig::default();

    let base_res = Resources::new();
    let baseline = train_ner(&toy.train, &base_res, &config).unwrap();
    let base_f1 = test_f1(&baseline, &toy.test, &base_res);

    let mut emb_res = Resources::new();
    emb_res.embeddings = Some(toy_embeddings(&toy.unlabeled, &toy.lexicons, 0));
    let grid = GridConfig { scale: Some(vec![0.5, 1.0, 2.0, 4.0, 8.0]), refit: Some(false), ..GridConfig::default() };
    let (with_emb, _) = grid_search(&toy.train, &toy.dev, &emb_res, &config, &grid).unwrap();
    let emb_f1 = test_f1(&with_emb, &toy.test, &emb_res);

    let elapsed = start.elapsed();
    outcome(
        emb_f1 >= base_f1 && base_f1 >= 0.7 && elapsed < Duration::from_secs(300),
        format!(
            "{tokens} labeled tokens, baseline test F1 {base_f1:.4}, +embeddings (scale {}) {emb_f1:.4}, {}",
            with_emb.features.scale,
            secs(elapsed)
        ),
    )
}

// ---------------------------------------------------------------- 8

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(808);
    let types = ["PER", "LOC", "ORG", "MISC"];
    let alphabet = LabelAlphabet::new(&types).unwrap();
    let mut round_trip_failures = 0;
    for _ in 0..1000 {
        let len = rng.gen_range(0..30);
        let mut spans = Vec::new();
        let mut pos = 0;
        while pos < len {
            pos += rng.gen_range(0..3);
            if pos >= len {
                break;
            }
            let end = (pos + rng.gen_range(1..5)).min(len);
            spans.push(Span::new(pos, end, *types.choose(&mut rng).unwrap()));
            pos = end;
        }
        let labels = encode_bilou(&spans, len, &alphabet).unwrap();
        if labels.len() != len || decode_bilou(&labels, &alphabet) != spans {
            round_trip_failures += 1;
        }
    }
    let mut fuzz_failures = 0;
    for _ in 0..10_000 {
        let len = rng.gen_range(0..25);
        let labels: Vec<usize> = (0..len).map(|_| rng.gen_range(0..alphabet.len())).collect();
        let spans = decode_bilou(&labels, &alphabet);
        let mut last_end = 0;
        let ok = spans.iter().all(|s| {
            let good = s.start >= last_end && s.start < s.end && s.end <= len && types.contains(&s.kind.as_str());
            last_end = s.end;
            good
        });
        if !ok {
            fuzz_failures += 1;
        }
    }
    outcome(
        round_trip_failures == 0 && fuzz_failures == 0,
        format!("1000 round trips ({round_trip_failures} failures), 10000 fuzzed decodes ({fuzz_failures} invalid)"),
    )
}

// ---------------------------------------------------------------- 9

/// Counts-based span F1, written without the crate's scorer: per sentence,
/// a predicted span is correct when an identical gold span exists.
fn brute_f1(gold: &[Vec<Span>], pred: &[Vec<Span>]) -> (usize, usize, usize, f64) {
    let (mut g, mut p, mut c) = (0, 0, 0);
    for (gs, ps) in gold.iter().zip(pred) {
        g += gs.len();
        p += ps.len();
        c += ps.iter().filter(|s| gs.contains(s)).count();
    }
    let precision = if p == 0 { 0.0 } else { c as f64 / p as f64 };
    let recall = if g == 0 { 0.0 } else { c as f64 / g as f64 };
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    (g, p, c, f1)
}

fn random_spans(rng: &mut ChaCha8Rng, len: usize, types: &[&str]) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut pos = 0;
    while pos < len {
        pos += rng.gen_range(0..4);
        if pos >= len {
            break;
        }
        let end = (pos + rng.gen_range(1..3)).min(len);
        spans.push(Span::new(pos, end, *types.choose(rng).unwrap()));
        pos = end;
    }
    spans
}

fn criterion_9() -> Outcome {
    let hand_gold = vec![vec![Span::new(0, 1, "PER"), Span::new(2, 4, "LOC")]];
    let hand_pred = vec![vec![Span::new(0, 1, "PER")]];
    let hand = score_spans(&hand_gold, &hand_pred).unwrap().overall;
    let hand_ok = hand.precision == 1.0 && hand.recall == 0.5 && hand.f1 == 2.0 / 3.0;

    let mut rng = ChaCha8Rng::seed_from_u64(909);
    let types = ["PER", "LOC", "ORG"];
    let mut disagreements = 0;
    for _ in 0..1000 {
        let n = rng.gen_range(1..6);
        let mut gold = Vec::new();
        let mut pred = Vec::new();
        for _ in 0..n {
            let len = rng.gen_range(1..12);
            let g = random_spans(&mut rng, len, &types);
            // predictions: perturb gold so that exact, partial and spurious matches all occur
            let p = if rng.gen_bool(0.3) { g.clone() } else { random_spans(&mut rng, len, &types) };
            gold.push(g);
            pred.push(p);
        }
        let report = score_spans(&gold, &pred).unwrap();
        let (g, p, c, f1) = brute_f1(&gold, &pred);
        let o = &report.overall;
        let mut agree = o.gold == g && o.predicted == p && o.correct == c && o.f1 == f1;
        // per-type agreement on the type-filtered problem
        let per_type: BTreeMap<&str, (usize, usize, usize, f64)> = types
            .iter()
            .map(|&t| {
                let keep = |v: &Vec<Vec<Span>>| -> Vec<Vec<Span>> {
                    v.iter().map(|s| s.iter().filter(|x| x.kind == t).cloned().collect()).collect()
                };
                (t, brute_f1(&keep(&gold), &keep(&pred)))
            })
            .collect();
        for (t, (g, p, c, f1)) in per_type {
            if let Some(r) = report.per_type.get(t) {
                agree &= r.gold == g && r.predicted == p && r.correct == c && r.f1 == f1;
            } else {
                agree &= g == 0 && p == 0;
            }
        }
        if !agree {
            disagreements += 1;
        }
    }
    outcome(
        hand_ok && disagreements == 0,
        format!(
            "hand case P={} R={} F1={:.6}; 1000 random cases, {disagreements} disagreements",
            hand.precision, hand.recall, hand.f1
        ),
    )
}

// ---------------------------------------------------------------- 10

fn criterion_10() -> Outcome {
    let corpus = zipf_corpus(1_000_000, 20_000, 1.0, 20, 10);
    let vocab = build_vocab(corpus.iter().flatten(), usize::MAX, 1).unwrap();
    let ids: Vec<Vec<u32>> = corpus.iter().map(|s| s.iter().map(|t| vocab.id(t).unwrap()).collect()).collect();
    let tokens: usize = ids.iter().map(Vec::len).sum();
    let run = |workers: usize| {
        let cfg = TrainConfig { dim: 50, window_radius: 10, workers, seed: 10, ..TrainConfig::default() };
        let start = Instant::now();
        train(vocab.clone(), &ids, &cfg, None).unwrap();
        start.elapsed()
    };
    let single = run(1);
    let four = run(4);
    let speedup = single.as_secs_f64() / four.as_secs_f64();
    let cores = std::thread::available_parallelism().map_or(1, |n| n.get());
    outcome(
        single < Duration::from_secs(300) && speedup >= 2.0,
        format!(
            "{tokens} tokens, 1 worker {} ({:.0} tok/s), 4 workers {} (speedup {speedup:.2}x) on {cores} available core(s)",
            secs(single),
            tokens as f64 / single.as_secs_f64(),
            secs(four)
        ),
    )
}

// ---------------------------------------------------------------- 11

fn bytes(write: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    write(&mut buf).unwrap();
    buf
}

fn criterion_11() -> Outcome {
    let toy = toy_ner(&ToyNerConfig { train_sentences: 120, dev_sentences: 40, test_sentences: 10, unlabeled_per_name: 10, ..ToyNerConfig::default() }, 11);
    let mut checks: Vec<(&str, bool)> = Vec::new();

    let embed = || {
        let m = toy_embeddings(&toy.unlabeled, &toy.lexicons, 11);
        let mut out = bytes(|b| m.write_embeddings(b));
        out.extend(bytes(|b| m.write_state(b)));
        out
    };
    checks.push(("embeddings", embed() == embed()));

    let labels = LabelAlphabet::new(&["PER", "LOC", "ORG"]).unwrap();
    let res = Resources::new();
    let feature_config = NerTrainConfig::default().features;
    let raw: Vec<RawSequence> = toy
        .train
        .iter()
        .flat_map(|d| lexemb::ner::document_sequences(d, &res, &feature_config, Some(&labels)).unwrap())
        .collect();
    let crf_cfg = CrfTrainConfig { epochs: 3, seed: 11, ..CrfTrainConfig::default() };
    let crf = || {
        let mut alphabet = FeatureAlphabet::new();
        let data: Vec<SequenceInstance> = raw.iter().map(|r| r.intern(&mut alphabet)).collect();
        let m = train_crf(&data, labels.clone(), alphabet, 0, &crf_cfg).unwrap();
        bytes(|b| m.write(b))
    };
    checks.push(("crf", crf() == crf()));

    let stacked_cfg = StackedConfig { crf: crf_cfg.clone(), ..StackedConfig::default() };
    let stacked = || bytes(|b| train_stacked(&raw, labels.clone(), 0, &stacked_cfg).unwrap().write(b));
    checks.push(("stacked crf", stacked() == stacked()));

    let mut emb_res = Resources::new();
    emb_res.embeddings = Some(toy_embeddings(&toy.unlabeled, &toy.lexicons, 11));
    let ner_cfg = NerTrainConfig { crf: crf_cfg.clone(), ..NerTrainConfig::default() };
    let ner = || bytes(|b| train_ner(&toy.train, &emb_res, &ner_cfg).unwrap().write(b));
    checks.push(("ner", ner() == ner()));

    let grid = GridConfig { scale: Some(vec![0.5, 2.0]), ..GridConfig::default() };
    let tuned = || bytes(|b| grid_search(&toy.train, &toy.dev, &emb_res, &ner_cfg, &grid).unwrap().0.write(b));
    checks.push(("grid search", tuned() == tuned()));

    let failed: Vec<&str> = checks.iter().filter(|c| !c.1).map(|c| c.0).collect();
    outcome(
        failed.is_empty(),
        format!(
            "identical artifacts across two runs for {}{}",
            checks.iter().map(|c| c.0).collect::<Vec<_>>().join(", "),
            if failed.is_empty() { String::new() } else { format!("; differing: {}", failed.join(", ")) }
        ),
    )
}

type Criterion = (usize, &'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "gradient correctness", criterion_1),
        (2, "hierarchical-softmax normalization", criterion_2),
        (3, "Huffman optimality", criterion_3),
        (4, "CRF oracle equivalence", criterion_4),
        (5, "RDA sparsity", criterion_5),
        (6, "lexicon-infusion direction", criterion_6),
        (7, "NER end-to-end direction", criterion_7),
        (8, "BILOU round trip and repair", criterion_8),
        (9, "F1 scorer", criterion_9),
        (10, "performance", criterion_10),
        (11, "determinism", criterion_11),
    ];
    let selected: Option<Vec<usize>> = std::env::var("LEXEMB_ACCEPTANCE")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let mut failures = 0;
    for (n, name, check) in criteria {
        if selected.as_ref().is_some_and(|s| !s.contains(&n)) {
            continue;
        }
        let result = check();
        if !result.pass {
            failures += 1;
        }
        println!("{} criterion {n} ({name}): {}", if result.pass { "PASS" } else { "FAIL" }, result.detail);
    }
    if failures > 0 {
        println!("{failures} acceptance criteria failed");
        std::process::exit(1);
    }
}
