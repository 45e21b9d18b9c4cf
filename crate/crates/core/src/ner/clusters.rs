//! Brown-cluster bit paths and their prefix features.

use std::collections::{BTreeSet, HashMap};
use std::io::BufRead;
use std::path::Path;

use crate::error::{Error, Result};
use crate::util;

pub const BROWN_PREFIX_LENGTHS: [usize; 4] = [4, 6, 10, 20];

/// Word → bit-path table, read from lines `bits<TAB>word<TAB>count`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ClusterTable {
    paths: HashMap<String, String>,
}

impl ClusterTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, word: &str, bits: &str) -> Result<()> {
        if bits.is_empty() || !bits.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::InvalidArgument(format!("cluster path `{bits}` is not a bit string")));
        }
        self.paths.insert(word.to_owned(), bits.to_owned());
        Ok(())
    }

    pub fn parse<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut table = ClusterTable::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::parse(source, n + 1, e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let (bits, word) = match (cols.next(), cols.next()) {
                (Some(b), Some(w)) if !w.is_empty() => (b, w),
                _ => return Err(Error::parse(source, n + 1, "expected `bits<TAB>word<TAB>count`")),
            };
            if let Some(count) = cols.next() {
                count
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::parse(source, n + 1, format!("bad count `{count}`")))?;
            }
            table.insert(word, bits).map_err(|e| Error::parse(source, n + 1, e.to_string()))?;
        }
        Ok(table)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(util::open_reader(path)?, &path.display().to_string())
    }

    /// Bit path of `word`, falling back to its lowercased form.
    pub fn path(&self, word: &str) -> Option<&str> {
        self.paths
            .get(word)
            .or_else(|| self.paths.get(&word.to_lowercase()))
            .map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }
}

/// Prefixes of the word's bit path at lengths 4, 6, 10 and 20 (the whole
/// path when shorter), deduplicated; empty for unknown words.
pub fn brown_features(word: &str, table: &ClusterTable) -> BTreeSet<String> {
    let Some(path) = table.path(word) else {
        return BTreeSet::new();
    };
    BROWN_PREFIX_LENGTHS
        .iter()
        .map(|&n| format!("brown={}", &path[..n.min(path.len())]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| format!("brown={s}")).collect()
    }

    #[test]
    fn spec_examples() {
        let t = ClusterTable::parse("0101100\tobama\t12\n0110\tthe\t99\n".as_bytes(), "c").unwrap();
        assert_eq!(brown_features("obama", &t), set(&["0101", "010110", "0101100"]));
        assert_eq!(brown_features("Obama", &t), set(&["0101", "010110", "0101100"]));
        assert!(brown_features("unknown", &t).is_empty());
        assert_eq!(brown_features("the", &t), set(&["0110"]));
    }

    #[test]
    fn long_paths_truncate_at_twenty() {
        let mut t = ClusterTable::new();
        t.insert("w", &"01".repeat(15)).unwrap();
        let f = brown_features("w", &t);
        assert_eq!(f.len(), 4);
        assert!(f.contains(&format!("brown={}", "01".repeat(10))));
    }

    #[test]
    fn malformed_lines() {
        assert!(matches!(ClusterTable::parse("01x\tw\t1\n".as_bytes(), "c"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(ClusterTable::parse("\n0101\n".as_bytes(), "c"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(ClusterTable::parse("01\tw\tmany\n".as_bytes(), "c"), Err(Error::Parse { line: 1, .. })));
    }
}
