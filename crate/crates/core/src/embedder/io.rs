//! Embedding persistence.
//!
//! The embedding file uses the common word2vec text layout: a `V dim`
//! header, then one `key v1 .. vdim` line per vocabulary entry in id order.
//! Training state that the text format cannot carry (vocabulary counts,
//! classifier vectors, lexicon names) goes to a sidecar at `<path>.state`:
//!
//! ```text
//! lexemb-state 1
//! <V> <dim> <K>
//! <count>                 V lines, vocabulary order
//! <lexicon name>          K lines
//! <v1> .. <vdim>          V-1 lines, inner-node classifiers
//! <v1> .. <vdim>          K lines, lexicon classifiers
//! ```
//!
//! Floats are written in shortest round-trip form, so save/load is exact.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use super::EmbeddingModel;
use crate::corpus::Vocabulary;
use crate::error::{Error, Result};
use crate::util::{self, LineReader as Lines};

pub const STATE_FORMAT_VERSION: u32 = 1;
const STATE_MAGIC: &str = "lexemb-state";

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".state");
    PathBuf::from(s)
}

fn write_row<W: Write>(mut w: W, row: &[f32]) -> std::io::Result<()> {
    let mut line = String::with_capacity(row.len() * 12);
    for (i, x) in row.iter().enumerate() {
        if i > 0 {
            line.push(' ');
        }
        write!(line, "{}", x).expect("writing to a String");
    }
    writeln!(w, "{}", line)
}

fn parse_row(fields: &[&str], dim: usize, source: &str, line: usize) -> Result<Vec<f32>> {
    if fields.len() != dim {
        return Err(Error::parse(source, line, format!("expected {dim} values, found {}", fields.len())));
    }
    fields
        .iter()
        .map(|f| f.parse::<f32>().map_err(|_| Error::parse(source, line, format!("bad number `{f}`"))))
        .collect()
}

fn parse_header(lines: &mut Lines<impl BufRead>, n: usize) -> Result<Vec<usize>> {
    let header = lines.next_line()?;
    let values: Vec<usize> = header
        .split_whitespace()
        .map(|f| f.parse().map_err(|_| lines.err(format!("bad header field `{f}`"))))
        .collect::<Result<_>>()?;
    if values.len() != n {
        return Err(lines.err(format!("header must have {n} fields")));
    }
    Ok(values)
}

impl EmbeddingModel {
    /// Writes the embedding text file.
    pub fn write_embeddings<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.vocab.len(), self.dim)?;
        for (id, (key, _)) in self.vocab.iter().enumerate() {
            write!(w, "{} ", key)?;
            write_row(&mut w, self.leaf_vector(id as u32))?;
        }
        Ok(())
    }

    /// Writes the training-state sidecar.
    pub fn write_state<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", STATE_MAGIC, STATE_FORMAT_VERSION)?;
        writeln!(w, "{} {} {}", self.vocab.len(), self.dim, self.lexicon_names.len())?;
        for c in self.vocab.counts() {
            writeln!(w, "{}", c)?;
        }
        for name in &self.lexicon_names {
            writeln!(w, "{}", name)?;
        }
        for row in self.node.chunks(self.dim) {
            write_row(&mut w, row)?;
        }
        for row in self.lex.chunks(self.dim) {
            write_row(&mut w, row)?;
        }
        Ok(())
    }

    /// Saves embeddings to `path` and training state to its sidecar.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = util::create_writer(path)?;
        self.write_embeddings(&mut w).map_err(|e| Error::io(path, e))?;
        util::flush(w, path)?;
        let state = sidecar_path(path);
        let mut w = util::create_writer(&state)?;
        self.write_state(&mut w).map_err(|e| Error::io(&state, e))?;
        util::flush(w, &state)
    }

    /// Loads a model saved by [`save`](Self::save). Without a sidecar the
    /// vocabulary gets synthetic counts `V, V-1, .., 1` that preserve the
    /// file order, and classifier vectors start at zero.
    pub fn load(path: &Path) -> Result<Self> {
        let source = path.display().to_string();
        let (keys, dim, leaf) = read_embeddings(util::open_reader(path)?, &source)?;
        let state = sidecar_path(path);
        if state.exists() {
            let state_source = state.display().to_string();
            Self::read_state(util::open_reader(&state)?, &state_source, keys, dim, leaf)
        } else {
            let v = keys.len();
            let counts: HashMap<String, u64> = keys.into_iter().enumerate().map(|(i, k)| (k, (v - i) as u64)).collect();
            let vocab = Vocabulary::from_counts(counts, 0, v.max(1), 1)?;
            EmbeddingModel::from_parts(vocab, vec![], dim, leaf, None, None)
        }
    }

    fn read_state<R: BufRead>(reader: R, source: &str, keys: Vec<String>, dim: usize, leaf: Vec<f32>) -> Result<Self> {
        let mut lines = Lines::new(reader, source);
        let magic = lines.next_line()?;
        let version = magic
            .strip_prefix(STATE_MAGIC)
            .and_then(|v| v.trim().parse::<u32>().ok())
            .ok_or_else(|| lines.err("not a training-state file"))?;
        if version != STATE_FORMAT_VERSION {
            return Err(lines.err(format!("unsupported state version {version}")));
        }
        let h = parse_header(&mut lines, 3)?;
        let (v, state_dim, k) = (h[0], h[1], h[2]);
        if v != keys.len() || state_dim != dim {
            return Err(lines.err("state does not match the embedding file"));
        }
        let mut counts = HashMap::with_capacity(v);
        let mut total = 0;
        for key in &keys {
            let line = lines.next_line()?;
            let c: u64 = line.trim().parse().map_err(|_| lines.err("bad count"))?;
            total += c;
            counts.insert(key.clone(), c);
        }
        let mut names = Vec::with_capacity(k);
        for _ in 0..k {
            names.push(lines.next_line()?.trim().to_owned());
        }
        let mut node = Vec::with_capacity(v.saturating_sub(1) * dim);
        for _ in 0..v.saturating_sub(1) {
            let line = lines.next_line()?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            node.extend(parse_row(&fields, dim, source, lines.line)?);
        }
        let mut lex = Vec::with_capacity(k * dim);
        for _ in 0..k {
            let line = lines.next_line()?;
            let fields: Vec<&str> = line.split_whitespace().collect();
            lex.extend(parse_row(&fields, dim, source, lines.line)?);
        }
        lines.expect_end()?;
        let vocab = Vocabulary::from_counts(counts, total, v.max(1), 1)?;
        if vocab.iter().zip(&keys).any(|((a, _), b)| a != b) {
            return Err(lines.err("counts do not reproduce the embedding order"));
        }
        EmbeddingModel::from_parts(vocab, names, dim, leaf, Some(node), Some(lex))
    }
}

/// Parses an embedding text file into keys, dimension and row-major vectors.
pub(crate) fn read_embeddings<R: BufRead>(reader: R, source: &str) -> Result<(Vec<String>, usize, Vec<f32>)> {
    let mut lines = Lines::new(reader, source);
    let h = parse_header(&mut lines, 2)?;
    let (v, dim) = (h[0], h[1]);
    if dim == 0 {
        return Err(lines.err("dimension must be positive"));
    }
    let mut keys = Vec::with_capacity(v);
    let mut leaf = Vec::with_capacity(v * dim);
    for _ in 0..v {
        let line = lines.next_line()?;
        let mut fields = line.split_whitespace();
        let key = fields.next().ok_or_else(|| lines.err("missing key"))?;
        let rest: Vec<&str> = fields.collect();
        leaf.extend(parse_row(&rest, dim, source, lines.line)?);
        keys.push(key.to_owned());
    }
    lines.expect_end()?;
    Ok((keys, dim, leaf))
}
