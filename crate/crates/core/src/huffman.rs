//! Huffman coding tree over vocabulary frequencies.
//!
//! Leaves are vocabulary ids `0..V`; inner nodes are numbered `0..V-1` in
//! creation order, so the root is inner node `V-2`. Each leaf's path is the
//! sequence of inner nodes from the root down to its parent together with
//! the branch taken at each: `+1` for the first child, `-1` for the second.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::Write;

use crate::corpus::Vocabulary;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HuffmanTree {
    leaf_count: usize,
    /// Children of each inner node, as node ids in `0..2V-1` (leaves first).
    children: Vec<[u32; 2]>,
    offsets: Vec<usize>,
    path_nodes: Vec<u32>,
    path_labels: Vec<i8>,
}

/// Root-to-leaf decision sequence for one leaf.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CodePath<'a> {
    pub nodes: &'a [u32],
    pub labels: &'a [i8],
}

impl CodePath<'_> {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

impl HuffmanTree {
    pub fn from_vocab(vocab: &Vocabulary) -> Result<Self> {
        let counts: Vec<u64> = vocab.counts().collect();
        Self::from_counts(&counts)
    }

    /// Builds the tree by repeatedly merging the two lightest subtrees.
    /// Equal weights are resolved in creation order, leaves ordered by id.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let v = counts.len();
        if v < 2 {
            return Err(Error::InvalidArgument(format!(
                "a Huffman tree needs at least 2 leaves, got {v}"
            )));
        }
        let mut heap: BinaryHeap<Reverse<(u64, u32)>> = counts
            .iter()
            .enumerate()
            .map(|(i, &c)| Reverse((c, i as u32)))
            .collect();
        let mut children = Vec::with_capacity(v - 1);
        let mut parent = vec![u32::MAX; 2 * v - 1];
        let mut second = vec![false; 2 * v - 1];
        while heap.len() > 1 {
            let Reverse((w1, n1)) = heap.pop().expect("heap has two items");
            let Reverse((w2, n2)) = heap.pop().expect("heap has two items");
            let inner = (v + children.len()) as u32;
            children.push([n1, n2]);
            parent[n1 as usize] = inner;
            parent[n2 as usize] = inner;
            second[n2 as usize] = true;
            heap.push(Reverse((w1 + w2, inner)));
        }

        let mut offsets = Vec::with_capacity(v + 1);
        let mut path_nodes = Vec::new();
        let mut path_labels = Vec::new();
        offsets.push(0);
        let mut nodes = Vec::new();
        let mut labels = Vec::new();
        for leaf in 0..v {
            nodes.clear();
            labels.clear();
            let mut n = leaf;
            while parent[n] != u32::MAX {
                nodes.push(parent[n] - v as u32);
                labels.push(if second[n] { -1 } else { 1 });
                n = parent[n] as usize;
            }
            path_nodes.extend(nodes.iter().rev());
            path_labels.extend(labels.iter().rev());
            offsets.push(path_nodes.len());
        }

        Ok(HuffmanTree {
            leaf_count: v,
            children,
            offsets,
            path_nodes,
            path_labels,
        })
    }

    pub fn leaf_count(&self) -> usize {
        self.leaf_count
    }

    pub fn inner_count(&self) -> usize {
        self.leaf_count - 1
    }

    pub fn root(&self) -> u32 {
        (self.leaf_count - 2) as u32
    }

    /// Children of inner node `inner`, as node ids (`< V` are leaves).
    pub fn children(&self, inner: u32) -> [u32; 2] {
        self.children[inner as usize]
    }

    pub fn path_of(&self, id: u32) -> Result<CodePath<'_>> {
        if (id as usize) >= self.leaf_count {
            return Err(Error::OutOfRange {
                id: id as usize,
                len: self.leaf_count,
            });
        }
        Ok(self.path(id))
    }

    /// Unchecked variant of [`path_of`](Self::path_of). Panics on a bad id.
    #[inline]
    pub fn path(&self, id: u32) -> CodePath<'_> {
        let (s, e) = (self.offsets[id as usize], self.offsets[id as usize + 1]);
        CodePath {
            nodes: &self.path_nodes[s..e],
            labels: &self.path_labels[s..e],
        }
    }

    pub fn code_len(&self, id: u32) -> usize {
        self.offsets[id as usize + 1] - self.offsets[id as usize]
    }

    /// Frequency-weighted code length sum, `sum_i count_i * len_i`.
    pub fn weighted_length(&self, counts: &[u64]) -> u64 {
        counts
            .iter()
            .enumerate()
            .map(|(i, &c)| c * self.code_len(i as u32) as u64)
            .sum()
    }

    /// Writes `key<TAB>bits` per leaf, `0` for a `+1` branch and `1` for `-1`.
    pub fn dump<W: Write>(&self, vocab: &Vocabulary, mut w: W) -> std::io::Result<()> {
        for id in 0..self.leaf_count as u32 {
            let bits: String = self
                .path(id)
                .labels
                .iter()
                .map(|&l| if l > 0 { '0' } else { '1' })
                .collect();
            writeln!(w, "{}\t{}", vocab.key(id), bits)?;
        }
        Ok(())
    }
}
