//! Baseline NER feature templates.
//!
//! Each token gets its own template outputs (word, digit-free lowercased
//! word, capitalization pattern, punctuation, 4-character prefix/suffix,
//! character 2-5-grams, gazetteer memberships, demonym flag, Brown-cluster
//! prefixes). The features of a position are its own, its neighbors' up to
//! distance 2 (prefixed with the offset), a bag of selected features over
//! a window of total width 8, and a first-occurrence marker.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::clusters::{brown_features, ClusterTable};
use super::conll::{Document, Sentence};
use super::phrases::{assign_phrases, embedding_block, DEFAULT_PHRASE_LEN};
use crate::corpus::PHRASE_SEPARATOR;
use crate::crf::{encode_bilou, LabelAlphabet, RawSequence};
use crate::embedder::EmbeddingModel;
use crate::error::Result;
use crate::lexicons::LexiconSet;

pub const DEFAULT_NEIGHBOR_RADIUS: usize = 2;
/// Radius 4 gives the window of total width 8 around a token.
pub const DEFAULT_BAG_RADIUS: usize = 4;
/// Longest gazetteer entry matched, in tokens.
pub const MAX_GAZETTEER_LEN: usize = 3;

/// ASCII and common Unicode punctuation.
pub fn is_punctuation(token: &str) -> bool {
    !token.is_empty()
        && token
            .chars()
            .all(|c| c.is_ascii_punctuation() || matches!(c, '–' | '—' | '‘' | '’' | '“' | '”' | '…' | '«' | '»' | '¿' | '¡'))
}

/// Capitalization pattern: `X` upper, `x` lower, `d` digit, other
/// characters literal; runs of the same class compress to `c+`.
pub fn cap_pattern(token: &str) -> String {
    let mut out = String::new();
    let mut last: Option<char> = None;
    let mut repeated = false;
    for ch in token.chars() {
        let c = if ch.is_uppercase() {
            'X'
        } else if ch.is_lowercase() {
            'x'
        } else if ch.is_numeric() {
            'd'
        } else {
            ch
        };
        if Some(c) == last {
            if !repeated {
                out.push('+');
                repeated = true;
            }
        } else {
            out.push(c);
            last = Some(c);
            repeated = false;
        }
    }
    out
}

/// Lowercased word with digits removed.
pub fn digitless_lower(token: &str) -> String {
    token.chars().filter(|c| !c.is_numeric()).flat_map(char::to_lowercase).collect()
}

/// Character n-grams of lengths `lo..=hi`.
pub fn char_ngrams(token: &str, lo: usize, hi: usize) -> BTreeSet<String> {
    let chars: Vec<char> = token.chars().collect();
    let mut out = BTreeSet::new();
    for n in lo..=hi {
        for w in chars.windows(n) {
            out.insert(w.iter().collect());
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureConfig {
    pub neighbor_radius: usize,
    pub bag_radius: usize,
    /// Multiplier applied to embedding vectors.
    pub scale: f64,
    /// Adds the embeddings of the immediate neighbors to the dense block.
    pub neighbor_embeddings: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            neighbor_radius: DEFAULT_NEIGHBOR_RADIUS,
            bag_radius: DEFAULT_BAG_RADIUS,
            scale: 1.0,
            neighbor_embeddings: false,
        }
    }
}

/// External knowledge used by the feature extractor.
#[derive(Clone, Debug, Default)]
pub struct Resources {
    pub gazetteers: LexiconSet,
    pub demonyms: HashSet<String>,
    pub clusters: Option<ClusterTable>,
    pub embeddings: Option<EmbeddingModel>,
}

impl Resources {
    pub fn new() -> Self {
        Resources {
            gazetteers: LexiconSet::empty(),
            ..Default::default()
        }
    }

    /// Width of the dense block produced under `config`.
    pub fn dense_dim(&self, config: &FeatureConfig) -> usize {
        match &self.embeddings {
            Some(m) if config.neighbor_embeddings => 3 * m.dim(),
            Some(m) => m.dim(),
            None => 0,
        }
    }
}

/// Token-local template outputs for every position of `sentence`.
pub fn token_features(sentence: &[String], resources: &Resources) -> Vec<BTreeSet<String>> {
    let n = sentence.len();
    let mut feats: Vec<BTreeSet<String>> = sentence
        .iter()
        .map(|tok| {
            let mut f = BTreeSet::new();
            f.insert(format!("w={tok}"));
            f.insert(format!("lcnd={}", digitless_lower(tok)));
            f.insert(format!("cap={}", cap_pattern(tok)));
            if is_punctuation(tok) {
                f.insert("punct".to_owned());
            }
            let chars: Vec<char> = tok.chars().collect();
            f.insert(format!("pre4={}", chars[..chars.len().min(4)].iter().collect::<String>()));
            f.insert(format!("suf4={}", chars[chars.len().saturating_sub(4)..].iter().collect::<String>()));
            f.extend(char_ngrams(tok, 2, 5).into_iter().map(|g| format!("ng={g}")));
            if resources.demonyms.contains(tok) || resources.demonyms.contains(&tok.to_lowercase()) {
                f.insert("demonym".to_owned());
            }
            if let Some(table) = &resources.clusters {
                f.extend(brown_features(tok, table));
            }
            f
        })
        .collect();
    if !resources.gazetteers.is_empty() {
        let sep = PHRASE_SEPARATOR.to_string();
        let lower: Vec<String> = sentence.iter().map(|t| t.to_lowercase()).collect();
        for i in 0..n {
            for len in 1..=MAX_GAZETTEER_LEN.min(n - i) {
                let key = lower[i..i + len].join(&sep);
                for &g in resources.gazetteers.memberships(&key) {
                    let name = &resources.gazetteers.names()[g];
                    for f in &mut feats[i..i + len] {
                        f.insert(format!("gaz={name}"));
                    }
                }
            }
        }
    }
    feats
}

/// Token features that enter the window bag.
fn in_bag(feature: &str) -> bool {
    feature.starts_with("lcnd=") || feature.starts_with("gaz=") || feature == "demonym"
}

/// Full binary feature sets for one sentence; `seen` tracks word types
/// already met in the document.
pub fn sentence_features(sentence: &[String], resources: &Resources, config: &FeatureConfig, seen: &mut HashSet<String>) -> Vec<Vec<String>> {
    let local = token_features(sentence, resources);
    let n = sentence.len() as isize;
    let mut out = Vec::with_capacity(sentence.len());
    for (t, tok) in sentence.iter().enumerate() {
        let ti = t as isize;
        let mut f: Vec<String> = local[t].iter().cloned().collect();
        let r = config.neighbor_radius as isize;
        for o in (-r..=r).filter(|&o| o != 0) {
            let j = ti + o;
            if (0..n).contains(&j) {
                f.extend(local[j as usize].iter().map(|x| format!("[{o}]{x}")));
            } else {
                f.push(format!("[{o}]<pad>"));
            }
        }
        let b = config.bag_radius as isize;
        let mut bag = BTreeSet::new();
        for j in (ti - b).max(0)..(ti + b + 1).min(n) {
            if j != ti {
                bag.extend(local[j as usize].iter().filter(|x| in_bag(x)));
            }
        }
        f.extend(bag.into_iter().map(|x| format!("bag|{x}")));
        if seen.insert(tok.clone()) {
            f.push("first_occ".to_owned());
        }
        f.push("bias".to_owned());
        out.push(f);
    }
    out
}

/// Dense blocks for one sentence: the scaled phrase embedding of each
/// token, plus its neighbors' when enabled. Empty without embeddings.
pub fn dense_features(sentence: &[String], resources: &Resources, config: &FeatureConfig) -> Vec<Vec<f64>> {
    let Some(model) = &resources.embeddings else {
        return vec![Vec::new(); sentence.len()];
    };
    let phrases = assign_phrases(sentence, model.vocab(), DEFAULT_PHRASE_LEN);
    let blocks: Vec<Vec<f64>> = phrases.iter().map(|&p| embedding_block(p, model, config.scale)).collect();
    if !config.neighbor_embeddings {
        return blocks;
    }
    let zero = vec![0.0; model.dim()];
    (0..sentence.len())
        .map(|t| {
            let prev = if t > 0 { &blocks[t - 1] } else { &zero };
            let next = blocks.get(t + 1).unwrap_or(&zero);
            [&blocks[t], prev, next].into_iter().flatten().copied().collect()
        })
        .collect()
}

/// Converts a document into CRF sequences, one per sentence. Gold labels
/// are attached when `labels` is given.
pub fn document_sequences(doc: &Document, resources: &Resources, config: &FeatureConfig, labels: Option<&LabelAlphabet>) -> Result<Vec<RawSequence>> {
    let mut seen = HashSet::new();
    doc.sentences
        .iter()
        .map(|s| sentence_sequence(s, resources, config, labels, &mut seen))
        .collect()
}

fn sentence_sequence(
    s: &Sentence,
    resources: &Resources,
    config: &FeatureConfig,
    labels: Option<&LabelAlphabet>,
    seen: &mut HashSet<String>,
) -> Result<RawSequence> {
    let gold = labels.map(|l| encode_bilou(&s.spans, s.len(), l)).transpose()?;
    Ok(RawSequence {
        tokens: s.tokens.clone(),
        features: sentence_features(&s.tokens, resources, config, seen),
        dense: dense_features(&s.tokens, resources, config),
        gold,
    })
}

/// Sorted entity types occurring in `docs`.
pub fn entity_types(docs: &[Document]) -> Vec<String> {
    let set: BTreeSet<&str> = docs
        .iter()
        .flat_map(|d| &d.sentences)
        .flat_map(|s| &s.spans)
        .map(|s| s.kind.as_str())
        .collect();
    set.into_iter().map(str::to_owned).collect()
}

/// Feature multiset of a sentence, for determinism checks.
pub fn feature_counts(features: &[Vec<String>]) -> HashMap<&str, usize> {
    let mut m = HashMap::new();
    for f in features.iter().flatten() {
        *m.entry(f.as_str()).or_insert(0) += 1;
    }
    m
}
