//! Named phrase lexicons and signed lexicon-label sampling.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::path::{Path, PathBuf};

use rand::Rng;

use crate::corpus::normalize_key;
use crate::error::{Error, Result};
use crate::util;

/// Default fraction of non-member lexicons kept as negative labels (0.01%).
pub const DEFAULT_NEG_RATE: f64 = 0.0001;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LexiconSet {
    names: Vec<String>,
    members: Vec<BTreeSet<String>>,
    membership: HashMap<String, Vec<usize>>,
}

/// One signed lexicon label: `label` is `+1` for members, `-1` otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LexLabel {
    pub lexicon: usize,
    pub label: i8,
}

impl LexiconSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a set from in-memory entries. Entries are normalized with
    /// [`normalize_key`]; duplicates collapse.
    pub fn from_entries<N, I, S>(lexicons: impl IntoIterator<Item = (N, I)>) -> Result<Self>
    where
        N: Into<String>,
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = LexiconSet::default();
        let mut seen = HashSet::new();
        for (name, entries) in lexicons {
            let name = name.into();
            if !seen.insert(name.clone()) {
                return Err(Error::InvalidArgument(format!("duplicate lexicon name `{name}`")));
            }
            let idx = set.names.len();
            let mut members = BTreeSet::new();
            for e in entries {
                let key = normalize_key(e.as_ref());
                if !key.is_empty() && members.insert(key.clone()) {
                    set.membership.entry(key).or_default().push(idx);
                }
            }
            set.names.push(name);
            set.members.push(members);
        }
        Ok(set)
    }

    /// Loads one lexicon per `(name, path)` pair; each file holds one
    /// phrase per line.
    pub fn load(files: &[(String, PathBuf)]) -> Result<Self> {
        let mut lexicons = Vec::with_capacity(files.len());
        for (name, path) in files {
            lexicons.push((name.clone(), util::read_entries(path)?));
        }
        Self::from_entries(lexicons)
    }

    /// Lexicon name derived from a file path (its stem).
    pub fn name_from_path(path: &Path) -> String {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string())
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn members(&self, lexicon: usize) -> &BTreeSet<String> {
        &self.members[lexicon]
    }

    /// Indices of lexicons containing `key`, ascending. Empty for unknown keys.
    pub fn memberships(&self, key: &str) -> &[usize] {
        self.membership.get(key).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Samples labels for `key`: every membership as `+1`, and each other
    /// lexicon as `-1` independently with probability `neg_rate`.
    pub fn sample_labels<R: Rng>(&self, key: &str, neg_rate: f64, rng: &mut R) -> Vec<LexLabel> {
        let mut out = Vec::new();
        sample_labels_into(self.memberships(key), self.len(), neg_rate, rng, &mut out);
        out
    }
}

/// Appends sampled labels for an item with the given sorted memberships.
///
/// No random draws are consumed when `neg_rate` is 0 or 1.
pub fn sample_labels_into<R: Rng>(
    memberships: &[usize],
    lexicon_count: usize,
    neg_rate: f64,
    rng: &mut R,
    out: &mut Vec<LexLabel>,
) {
    let mut next = memberships.iter().peekable();
    for s in 0..lexicon_count {
        if next.peek() == Some(&&s) {
            next.next();
            out.push(LexLabel { lexicon: s, label: 1 });
        } else if neg_rate >= 1.0 || (neg_rate > 0.0 && rng.gen::<f64>() < neg_rate) {
            out.push(LexLabel { lexicon: s, label: -1 });
        }
    }
}
