//! Corpus ingestion: vocabulary construction, PMI phrase mining and greedy
//! segmentation of token streams into phrase ids.
//!
//! Input is pre-tokenized text, one sentence per line, tokens separated by
//! whitespace. Multi-token phrases are keyed by joining their tokens with
//! `_`. Tokens that already contain `_` are taken verbatim, so a key such as
//! `new_york` may come either from the single token `new_york` or from the
//! two tokens `new york`.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::io::{BufRead, Write};
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::util;

pub const PHRASE_SEPARATOR: char = '_';

pub const DEFAULT_MAX_VOCAB: usize = 1_000_000;
pub const DEFAULT_MIN_COUNT: u64 = 5;
pub const DEFAULT_PMI_THRESHOLD: f64 = 1000.0;
pub const DEFAULT_MAX_PHRASE_LEN: usize = 3;

/// A small English stopword list used when no list is supplied.
pub const DEFAULT_STOPWORDS: &[&str] = &[
    "a", "about", "after", "all", "also", "an", "and", "any", "are", "as", "at", "be", "been",
    "but", "by", "can", "could", "did", "do", "does", "for", "from", "had", "has", "have", "he",
    "her", "his", "how", "i", "if", "in", "into", "is", "it", "its", "may", "more", "most", "not",
    "of", "on", "one", "or", "other", "our", "she", "should", "so", "some", "such", "than",
    "that", "the", "their", "them", "then", "there", "these", "they", "this", "those", "to",
    "was", "we", "were", "what", "when", "where", "which", "while", "who", "will", "with",
    "would", "you", "your",
];

/// Joins tokens into a phrase key.
pub fn join_key<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut key = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            key.push(PHRASE_SEPARATOR);
        }
        key.push_str(t.as_ref());
    }
    key
}

/// Normalizes a free-text entry ("New York") into a phrase key ("new_york").
pub fn normalize_key(entry: &str) -> String {
    let tokens: Vec<String> = entry.split_whitespace().map(str::to_lowercase).collect();
    join_key(&tokens)
}

/// Splits a corpus line into tokens, optionally lowercasing them.
pub fn tokenize_line(line: &str, lowercase: bool) -> Vec<String> {
    line.split_whitespace()
        .map(|t| if lowercase { t.to_lowercase() } else { t.to_owned() })
        .collect()
}

/// Reads a corpus file: one sentence per line, whitespace-separated tokens.
/// Empty lines are dropped.
pub fn read_corpus(path: &Path, lowercase: bool) -> Result<Vec<Vec<String>>> {
    let reader = util::open_reader(path)?;
    let mut sentences = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let tokens = tokenize_line(&line, lowercase);
        if !tokens.is_empty() {
            sentences.push(tokens);
        }
    }
    Ok(sentences)
}

/// Phrase-key vocabulary with frequencies.
///
/// Ids are dense, ordered by descending count with ties broken by key.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vocabulary {
    entries: Vec<(String, u64)>,
    index: HashMap<String, u32>,
    total_tokens: u64,
}

impl Vocabulary {
    /// Builds a vocabulary from raw counts. Keys below `min_count` are
    /// dropped, then the `max_size` most frequent are kept.
    pub fn from_counts(
        counts: HashMap<String, u64>,
        total_tokens: u64,
        max_size: usize,
        min_count: u64,
    ) -> Result<Self> {
        if max_size == 0 {
            return Err(Error::InvalidArgument("max_size must be at least 1".into()));
        }
        if min_count == 0 {
            return Err(Error::InvalidArgument("min_count must be at least 1".into()));
        }
        let mut entries: Vec<(String, u64)> = counts
            .into_iter()
            .filter(|&(_, c)| c >= min_count)
            .collect();
        entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        entries.truncate(max_size);
        Ok(Self::from_sorted(entries, total_tokens))
    }

    fn from_sorted(entries: Vec<(String, u64)>, total_tokens: u64) -> Self {
        let index = entries
            .iter()
            .enumerate()
            .map(|(i, (k, _))| (k.clone(), i as u32))
            .collect();
        Vocabulary {
            entries,
            index,
            total_tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn id(&self, key: &str) -> Option<u32> {
        self.index.get(key).copied()
    }

    pub fn contains(&self, key: &str) -> bool {
        self.index.contains_key(key)
    }

    /// Panics if `id` is out of range.
    pub fn key(&self, id: u32) -> &str {
        &self.entries[id as usize].0
    }

    pub fn count(&self, id: u32) -> u64 {
        self.entries[id as usize].1
    }

    pub fn counts(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|e| e.1)
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(k, c)| (k.as_str(), *c))
    }

    /// Writes `key<TAB>count` lines in id order.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (k, c) in &self.entries {
            writeln!(w, "{}\t{}", k, c)?;
        }
        Ok(())
    }

    /// Reads a vocabulary file. Entries are re-sorted to restore the id
    /// order invariant; the token total is taken as the sum of counts.
    pub fn read<R: BufRead>(reader: R, source_name: &str) -> Result<Self> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(source_name, n + 1, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let (key, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(source_name, n + 1, "expected key<TAB>count"))?;
            let count: u64 = count
                .trim()
                .parse()
                .map_err(|_| Error::parse(source_name, n + 1, "count is not an integer"))?;
            if count == 0 {
                return Err(Error::parse(source_name, n + 1, "count must be positive"));
            }
            if !seen.insert(key.to_owned()) {
                return Err(Error::parse(source_name, n + 1, format!("duplicate key `{key}`")));
            }
            entries.push((key.to_owned(), count));
        }
        entries.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let total = entries.iter().map(|e| e.1).sum();
        Ok(Self::from_sorted(entries, total))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(util::open_reader(path)?, &path.display().to_string())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = util::create_writer(path)?;
        self.write(&mut w).map_err(|e| Error::io(path, e))?;
        util::flush(w, path)
    }
}

/// Counts a key stream and builds a vocabulary over it.
///
/// An empty stream yields an empty vocabulary.
pub fn build_vocab<I, S>(tokens: I, max_size: usize, min_count: u64) -> Result<Vocabulary>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts: HashMap<String, u64> = HashMap::new();
    let mut total = 0u64;
    for t in tokens {
        let t = t.as_ref();
        total += 1;
        match counts.get_mut(t) {
            Some(c) => *c += 1,
            None => {
                counts.insert(t.to_owned(), 1);
            }
        }
    }
    Vocabulary::from_counts(counts, total, max_size, min_count)
}

/// Unigram and adjacent-bigram counts over a set of sentences. Bigrams
/// never cross sentence boundaries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NGramCounts {
    unigram: HashMap<String, u64>,
    bigram: HashMap<(String, String), u64>,
    total: u64,
}

impl NGramCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sentence<S: AsRef<str>>(&mut self, tokens: &[S]) {
        for t in tokens {
            *self.unigram.entry(t.as_ref().to_owned()).or_insert(0) += 1;
        }
        for pair in tokens.windows(2) {
            let key = (pair[0].as_ref().to_owned(), pair[1].as_ref().to_owned());
            *self.bigram.entry(key).or_insert(0) += 1;
        }
        self.total += tokens.len() as u64;
    }

    /// Adds another shard's counts. Merging is commutative.
    pub fn merge(&mut self, other: NGramCounts) {
        for (k, c) in other.unigram {
            *self.unigram.entry(k).or_insert(0) += c;
        }
        for (k, c) in other.bigram {
            *self.bigram.entry(k).or_insert(0) += c;
        }
        self.total += other.total;
    }

    /// Counts sentences in parallel shards.
    pub fn from_sentences<S: AsRef<str> + Sync>(sentences: &[Vec<S>]) -> Self {
        sentences
            .par_chunks(4096)
            .map(|chunk| {
                let mut c = NGramCounts::new();
                for s in chunk {
                    c.add_sentence(s);
                }
                c
            })
            .reduce(NGramCounts::new, |mut a, b| {
                a.merge(b);
                a
            })
    }

    pub fn unigram(&self, token: &str) -> u64 {
        self.unigram.get(token).copied().unwrap_or(0)
    }

    pub fn bigram(&self, a: &str, b: &str) -> u64 {
        self.bigram
            .get(&(a.to_owned(), b.to_owned()))
            .copied()
            .unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn bigrams(&self) -> impl Iterator<Item = (&str, &str, u64)> {
        self.bigram
            .iter()
            .map(|((a, b), c)| (a.as_str(), b.as_str(), *c))
    }

    pub fn unigrams(&self) -> impl Iterator<Item = (&str, u64)> {
        self.unigram.iter().map(|(k, c)| (k.as_str(), *c))
    }
}

/// Scaled PMI score `(count(ab) - discount) * N / (count(a) * count(b))`.
///
/// Returns 0 when the bigram is unseen or the discounted count is not
/// positive.
pub fn pmi_score(a: &str, b: &str, counts: &NGramCounts, discount: f64) -> Result<f64> {
    let ca = counts.unigram(a);
    if ca == 0 {
        return Err(Error::UnseenToken(a.to_owned()));
    }
    let cb = counts.unigram(b);
    if cb == 0 {
        return Err(Error::UnseenToken(b.to_owned()));
    }
    Ok(score_from_counts(counts.bigram(a, b), ca, cb, counts.total(), discount))
}

fn score_from_counts(cab: u64, ca: u64, cb: u64, total: u64, discount: f64) -> f64 {
    let num = cab as f64 - discount;
    if cab == 0 || num <= 0.0 {
        return 0.0;
    }
    num * total as f64 / (ca as f64 * cb as f64)
}

/// Set of multi-token phrase keys.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhraseTable {
    phrases: BTreeSet<String>,
    max_len: usize,
}

impl PhraseTable {
    pub fn new(max_len: usize) -> Self {
        PhraseTable {
            phrases: BTreeSet::new(),
            max_len,
        }
    }

    /// Inserts a phrase given as tokens. Returns false (and ignores the
    /// phrase) when its length is outside `2..=max_len`.
    pub fn insert_tokens<S: AsRef<str>>(&mut self, tokens: &[S]) -> bool {
        if tokens.len() < 2 || tokens.len() > self.max_len {
            return false;
        }
        self.phrases.insert(join_key(tokens));
        true
    }

    pub fn contains(&self, key: &str) -> bool {
        self.phrases.contains(key)
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn len(&self) -> usize {
        self.phrases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phrases.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.phrases.iter().map(String::as_str)
    }

    /// Writes one key per line in sorted order.
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for p in &self.phrases {
            writeln!(w, "{}", p)?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = util::create_writer(path)?;
        self.write(&mut w).map_err(|e| Error::io(path, e))?;
        util::flush(w, path)
    }

    /// Loads a phrase file. `max_len` grows to the longest phrase read.
    pub fn load(path: &Path, max_len: usize) -> Result<Self> {
        let mut table = PhraseTable::new(max_len);
        for entry in util::read_entries(path)? {
            let n = entry.split(PHRASE_SEPARATOR).count();
            table.max_len = table.max_len.max(n);
            table.phrases.insert(entry);
        }
        Ok(table)
    }
}

/// Selects phrases from bigram statistics.
///
/// Bigrams scoring above `threshold` without a stopword are kept; every
/// pair of kept bigrams `(a, b)`, `(b, c)` contributes the trigram
/// `a_b_c`; `titles` (phrase keys) of 2 to 3 tokens are added verbatim.
pub fn mine_phrases(
    counts: &NGramCounts,
    threshold: f64,
    discount: f64,
    stopwords: &HashSet<String>,
    titles: &[String],
) -> Result<PhraseTable> {
    if threshold.is_nan() || threshold <= 0.0 {
        return Err(Error::InvalidArgument("threshold must be positive".into()));
    }
    let mut table = PhraseTable::new(DEFAULT_MAX_PHRASE_LEN);
    let mut by_first: HashMap<&str, Vec<&str>> = HashMap::new();
    let mut kept: Vec<(&str, &str)> = Vec::new();
    for (a, b, cab) in counts.bigrams() {
        if stopwords.contains(a) || stopwords.contains(b) {
            continue;
        }
        let score = score_from_counts(cab, counts.unigram(a), counts.unigram(b), counts.total(), discount);
        if score > threshold {
            kept.push((a, b));
            by_first.entry(a).or_default().push(b);
        }
    }
    for &(a, b) in &kept {
        table.insert_tokens(&[a, b]);
        if let Some(next) = by_first.get(b) {
            for &c in next {
                table.insert_tokens(&[a, b, c]);
            }
        }
    }
    for title in titles {
        let tokens: Vec<&str> = title.split(PHRASE_SEPARATOR).collect();
        table.insert_tokens(&tokens);
    }
    Ok(table)
}

/// Keys a sentence contributes to vocabulary counting: every unigram plus
/// every occurrence of an n-gram present in `table`. Unigrams and phrases
/// are ranked jointly by the vocabulary.
pub fn candidate_keys<S: AsRef<str>>(tokens: &[S], table: &PhraseTable) -> Vec<String> {
    let mut keys: Vec<String> = tokens.iter().map(|t| t.as_ref().to_owned()).collect();
    for n in 2..=table.max_len() {
        for window in tokens.windows(n) {
            let key = join_key(window);
            if table.contains(&key) {
                keys.push(key);
            }
        }
    }
    keys
}

/// Segments a sentence into phrase ids, scanning left to right and taking
/// the longest in-vocabulary match at each position. Tokens that match
/// nothing are skipped.
pub fn segment<S: AsRef<str>>(tokens: &[S], table: &PhraseTable, vocab: &Vocabulary) -> Vec<u32> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let longest = table.max_len().min(tokens.len() - i);
        let mut matched = None;
        for n in (2..=longest).rev() {
            if let Some(id) = vocab.id(&join_key(&tokens[i..i + n])) {
                matched = Some((id, n));
                break;
            }
        }
        if matched.is_none() {
            matched = vocab.id(tokens[i].as_ref()).map(|id| (id, 1));
        }
        match matched {
            Some((id, n)) => {
                out.push(id);
                i += n;
            }
            None => i += 1,
        }
    }
    out
}

/// Builds a vocabulary over a corpus, ranking unigrams and the phrase
/// occurrences found in `table` jointly (see [`candidate_keys`]).
pub fn build_phrase_vocab<S: AsRef<str> + Sync>(
    sentences: &[Vec<S>],
    table: &PhraseTable,
    max_size: usize,
    min_count: u64,
) -> Result<Vocabulary> {
    build_vocab(sentences.iter().flat_map(|s| candidate_keys(s, table)), max_size, min_count)
}

/// Segments every sentence with [`segment`], in parallel, preserving order.
pub fn segment_corpus<S: AsRef<str> + Sync>(sentences: &[Vec<S>], table: &PhraseTable, vocab: &Vocabulary) -> Vec<Vec<u32>> {
    sentences.par_iter().map(|s| segment(s, table, vocab)).collect()
}
