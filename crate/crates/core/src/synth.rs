//! Seeded synthetic corpora for examples, benchmarks and acceptance checks.
//!
//! Nothing here is needed to use the library on real data; the generators
//! exist so every capability can be demonstrated and measured offline.

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::crf::Span;
use crate::ner::{Document, Sentence};

const SYLLABLES: [&str; 24] = [
    "ka", "lo", "mi", "ren", "to", "sa", "vi", "dor", "el", "an", "bri", "ush", "ta", "ne", "qua", "ril", "os", "ven",
    "za", "ho", "lin", "mar", "ep", "gu",
];

/// Distinct capitalized pseudo-words built from a shared syllable
/// inventory, so spelling carries no information about their role.
pub fn pseudo_words(n: usize, rng: &mut impl Rng) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let k = rng.gen_range(2..=3);
        let w: String = (0..k).map(|_| *SYLLABLES.choose(rng).unwrap()).collect();
        let mut c = w.chars();
        let w = c.next().unwrap().to_uppercase().chain(c).collect::<String>();
        if seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// Sentences of Zipf-distributed tokens `t0, t1, ..` (rank `r` has weight
/// `1 / (r + 1)^exponent`) totalling `tokens` tokens.
pub fn zipf_corpus(tokens: usize, vocab_size: usize, exponent: f64, sentence_len: usize, seed: u64) -> Vec<Vec<String>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let names: Vec<String> = (0..vocab_size).map(|i| format!("t{i}")).collect();
    let dist = WeightedIndex::new((0..vocab_size).map(|r| 1.0 / ((r + 1) as f64).powf(exponent))).expect("positive weights");
    let mut out = Vec::with_capacity(tokens / sentence_len + 1);
    let mut left = tokens;
    while left > 0 {
        let n = sentence_len.min(left);
        out.push((0..n).map(|_| names[dist.sample(&mut rng)].clone()).collect());
        left -= n;
    }
    out
}

/// Corpus with two word classes that differ only in their contexts.
#[derive(Clone, Debug)]
pub struct TwoClassCorpus {
    pub sentences: Vec<Vec<String>>,
    /// The class a lexicon would mark.
    pub class_a: Vec<String>,
    pub class_b: Vec<String>,
}

/// Generates about `tokens` tokens of 9-token sentences centered on a word
/// of class A or B. Each other slot draws from the class's shared context
/// pool (30%), the center word's private context pool (30%) or a Zipfian
/// background vocabulary (40%), so class members are related but far from
/// identical.
pub fn two_class_corpus(tokens: usize, class_size: usize, seed: u64) -> TwoClassCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let class_a: Vec<String> = (0..class_size).map(|i| format!("a{i}")).collect();
    let class_b: Vec<String> = (0..class_size).map(|i| format!("b{i}")).collect();
    let shared = [
        (0..10).map(|i| format!("ca{i}")).collect::<Vec<_>>(),
        (0..10).map(|i| format!("cb{i}")).collect::<Vec<_>>(),
    ];
    let private: Vec<Vec<String>> = (0..2 * class_size).map(|w| (0..3).map(|j| format!("p{w}_{j}")).collect()).collect();
    let background: Vec<String> = (0..300).map(|i| format!("n{i}")).collect();
    let bg = WeightedIndex::new((0..background.len()).map(|r| 1.0 / (r + 1) as f64)).unwrap();
    let mut sentences = Vec::with_capacity(tokens / 9 + 1);
    let mut total = 0;
    while total < tokens {
        let class = rng.gen_range(0..2);
        let w = rng.gen_range(0..class_size);
        let center = if class == 0 { &class_a[w] } else { &class_b[w] };
        let mut s = Vec::with_capacity(9);
        for slot in 0..9 {
            if slot == 4 {
                s.push(center.clone());
                continue;
            }
            let u: f64 = rng.gen();
            let tok = if u < 0.3 {
                shared[class].choose(&mut rng).unwrap()
            } else if u < 0.6 {
                private[class * class_size + w].choose(&mut rng).unwrap()
            } else {
                &background[bg.sample(&mut rng)]
            };
            s.push(tok.clone());
        }
        total += s.len();
        sentences.push(s);
    }
    TwoClassCorpus {
        sentences,
        class_a,
        class_b,
    }
}

pub const TOY_TYPES: [&str; 3] = ["PER", "LOC", "ORG"];

/// NER templates per type; `{}` marks the entity slot.
const TYPED_TEMPLATES: [[&str; 4]; 3] = [
    [
        "{} said on Monday that the deal was done .",
        "President {} arrived late .",
        "Mr. {} told reporters he would resign .",
        "the coach praised {} after the match .",
    ],
    [
        "heavy rain fell in {} overnight .",
        "troops crossed the border near {} .",
        "the ambassador flew to {} on Sunday .",
        "hotels in {} are full .",
    ],
    [
        "shares of {} rose 5 percent .",
        "{} Inc. reported higher profits .",
        "the board of {} approved the merger .",
        "analysts downgraded {} stock .",
    ],
];

/// Templates whose context says nothing about the entity type.
const AMBIGUOUS_TEMPLATES: [&str; 3] = [
    "{} was mentioned in the report .",
    "we heard about {} yesterday .",
    "nobody expected {} to matter .",
];

/// Unlabeled contexts per type for the embedding corpus.
const UNLABELED_TEMPLATES: [[&str; 4]; 3] = [
    ["{} was born in the village", "{} married a cousin", "the wife of {} sang", "{} wrote a memoir"],
    ["the river flows through {}", "{} is a city in the north", "the population of {} grew", "the mayor of {} resigned"],
    ["{} hired a new ceo", "{} is a company based in the capital", "investors sold {} shares", "{} opened a factory"],
];

#[derive(Clone, Debug)]
pub struct ToyNerConfig {
    pub train_names: usize,
    pub dev_names: usize,
    pub test_names: usize,
    pub train_sentences: usize,
    pub dev_sentences: usize,
    pub test_sentences: usize,
    /// Fraction of labeled sentences drawn from type-ambiguous templates.
    pub ambiguous_rate: f64,
    /// Occurrences of each name in the unlabeled corpus.
    pub unlabeled_per_name: usize,
    pub sentences_per_doc: usize,
}

impl Default for ToyNerConfig {
    fn default() -> Self {
        ToyNerConfig {
            train_names: 30,
            dev_names: 10,
            test_names: 10,
            train_sentences: 420,
            dev_sentences: 140,
            test_sentences: 140,
            ambiguous_rate: 0.3,
            unlabeled_per_name: 40,
            sentences_per_doc: 20,
        }
    }
}

/// Labeled splits with disjoint entity names, an unlabeled corpus in which
/// every name occurs in type-revealing contexts, and per-type lexicons.
#[derive(Clone, Debug)]
pub struct ToyNer {
    pub train: Vec<Document>,
    pub dev: Vec<Document>,
    pub test: Vec<Document>,
    /// Lowercased sentences for embedding training.
    pub unlabeled: Vec<Vec<String>>,
    /// `(type, names)` covering all splits, lowercased.
    pub lexicons: Vec<(String, Vec<String>)>,
}

fn labeled_sentence(template: &str, name: &str, kind: &str) -> Sentence {
    let mut tokens = Vec::new();
    let mut span = None;
    for part in template.split(' ') {
        if part == "{}" {
            span = Some(Span::new(tokens.len(), tokens.len() + 1, kind));
            tokens.push(name.to_owned());
        } else {
            tokens.push(part.to_owned());
        }
    }
    Sentence::from_tokens(tokens, span.into_iter().collect())
}

pub fn toy_ner(config: &ToyNerConfig, seed: u64) -> ToyNer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per_type = config.train_names + config.dev_names + config.test_names;
    let all = pseudo_words(per_type * TOY_TYPES.len(), &mut rng);
    let names: Vec<&[String]> = all.chunks(per_type).collect();
    let ranges = [
        0..config.train_names,
        config.train_names..config.train_names + config.dev_names,
        config.train_names + config.dev_names..per_type,
    ];
    let counts = [config.train_sentences, config.dev_sentences, config.test_sentences];

    let mut splits: Vec<Vec<Document>> = Vec::new();
    for (range, &count) in ranges.iter().zip(&counts) {
        let mut sentences = Vec::with_capacity(count);
        for _ in 0..count {
            let t = rng.gen_range(0..TOY_TYPES.len());
            let name = &names[t][rng.gen_range(range.clone())];
            let template = if rng.gen_bool(config.ambiguous_rate) {
                *AMBIGUOUS_TEMPLATES.choose(&mut rng).unwrap()
            } else {
                *TYPED_TEMPLATES[t].choose(&mut rng).unwrap()
            };
            sentences.push(labeled_sentence(template, name, TOY_TYPES[t]));
        }
        let docs = sentences
            .chunks(config.sentences_per_doc.max(1))
            .enumerate()
            .map(|(id, s)| Document { id, sentences: s.to_vec() })
            .collect();
        splits.push(docs);
    }

    let mut unlabeled = Vec::new();
    for (t, pool) in names.iter().enumerate() {
        for name in pool.iter() {
            for _ in 0..config.unlabeled_per_name {
                let template = UNLABELED_TEMPLATES[t].choose(&mut rng).unwrap();
                let lower = name.to_lowercase();
                unlabeled.push(template.split(' ').map(|p| if p == "{}" { lower.clone() } else { p.to_owned() }).collect());
            }
        }
    }
    unlabeled.shuffle(&mut rng);

    let lexicons = TOY_TYPES
        .iter()
        .zip(&names)
        .map(|(t, pool)| (t.to_string(), pool.iter().map(|n| n.to_lowercase()).collect()))
        .collect();
    let test = splits.pop().unwrap();
    let dev = splits.pop().unwrap();
    let train = splits.pop().unwrap();
    ToyNer {
        train,
        dev,
        test,
        unlabeled,
        lexicons,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn zipf_corpus_size_and_skew() {
        let c = zipf_corpus(10_005, 100, 1.0, 20, 1);
        assert_eq!(c.iter().map(Vec::len).sum::<usize>(), 10_005);
        let t0 = c.iter().flatten().filter(|t| *t == "t0").count();
        let t50 = c.iter().flatten().filter(|t| *t == "t50").count();
        assert!(t0 > 10 * t50);
        assert_eq!(zipf_corpus(100, 10, 1.0, 7, 3), zipf_corpus(100, 10, 1.0, 7, 3));
    }

    #[test]
    fn two_class_corpus_shape() {
        let c = two_class_corpus(9_000, 5, 2);
        assert_eq!(c.sentences.len(), 1000);
        assert!(c.sentences.iter().all(|s| c.class_a.contains(&s[4]) || c.class_b.contains(&s[4])));
    }

    #[test]
    fn toy_ner_splits_hold_out_names() {
        let t = toy_ner(&ToyNerConfig::default(), 5);
        let names = |docs: &[Document]| -> HashSet<String> {
            docs.iter()
                .flat_map(|d| &d.sentences)
                .flat_map(|s| s.spans.iter().map(move |sp| s.tokens[sp.start].clone()))
                .collect()
        };
        let (tr, te) = (names(&t.train), names(&t.test));
        assert!(tr.is_disjoint(&te));
        assert!(te.iter().all(|n| t.unlabeled.iter().any(|s| s.contains(&n.to_lowercase()))));
        let tokens: usize = [&t.train, &t.dev, &t.test].iter().flat_map(|d| d.iter()).map(Document::token_count).sum();
        assert!((4_000..7_000).contains(&tokens), "{tokens}");
    }
}
