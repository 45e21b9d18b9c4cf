//! Line-based text format for CRF models.
//!
//! ```text
//! lexemb-crf 1
//! types <TAB> PER <TAB> LOC ...
//! dense <TAB> <dense_dim>
//! features <TAB> <F>
//! <feature string>            F lines, alphabet order
//! weights <TAB> <nonzero count>
//! <coordinate> <TAB> <value>  nonzero weights, coordinate order
//! ```
//!
//! A stacked model file is `lexemb-stacked 1`, a `radius <TAB> r` line,
//! then the layer-1 and layer-2 blocks back to back. Values are written in
//! shortest round-trip form, so reading reproduces every weight exactly.

use std::io::{BufRead, Write};
use std::path::Path;

use super::instance::FeatureAlphabet;
use super::labels::LabelAlphabet;
use super::model::CrfModel;
use super::stacked::StackedModel;
use crate::error::{Error, Result};
use crate::util::{self, LineReader};

pub const CRF_FORMAT_VERSION: u32 = 1;
const CRF_MAGIC: &str = "lexemb-crf";
const STACKED_MAGIC: &str = "lexemb-stacked";

pub(crate) fn field<'a, R: BufRead>(lines: &LineReader<R>, line: &'a str, key: &str) -> Result<&'a str> {
    line.strip_prefix(key)
        .and_then(|r| r.strip_prefix('\t'))
        .ok_or_else(|| lines.err(format!("expected `{key}` line")))
}

pub(crate) fn number<T: std::str::FromStr, R: BufRead>(lines: &LineReader<R>, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| lines.err(format!("bad number `{s}`")))
}

fn check_magic<R: BufRead>(lines: &mut LineReader<R>, magic: &str) -> Result<()> {
    let line = lines.next_line()?;
    let version = line
        .strip_prefix(magic)
        .and_then(|v| v.trim().parse::<u32>().ok())
        .ok_or_else(|| lines.err(format!("expected `{magic}` header")))?;
    if version != CRF_FORMAT_VERSION {
        return Err(lines.err(format!("unsupported format version {version}")));
    }
    Ok(())
}

impl CrfModel {
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CRF_MAGIC} {CRF_FORMAT_VERSION}")?;
        self.write_body(&mut w)
    }

    fn write_body<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        write!(w, "types")?;
        for t in self.labels.types() {
            write!(w, "\t{t}")?;
        }
        writeln!(w)?;
        writeln!(w, "dense\t{}", self.dense_dim)?;
        writeln!(w, "features\t{}", self.features.len())?;
        for name in self.features.names() {
            writeln!(w, "{name}")?;
        }
        writeln!(w, "weights\t{}", self.nonzero_weights())?;
        for (i, &x) in self.weights.iter().enumerate() {
            if x != 0.0 {
                writeln!(w, "{i}\t{x}")?;
            }
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut lines = LineReader::new(reader, source);
        let m = Self::read_from(&mut lines)?;
        lines.expect_end()?;
        Ok(m)
    }

    /// Reads one model block, header included, leaving later lines unread.
    pub(crate) fn read_from<R: BufRead>(lines: &mut LineReader<R>) -> Result<Self> {
        check_magic(lines, CRF_MAGIC)?;
        Self::read_body(lines)
    }

    fn read_body<R: BufRead>(lines: &mut LineReader<R>) -> Result<Self> {
        let line = lines.next_line()?;
        let types: Vec<&str> = if line == "types" {
            vec![]
        } else {
            field(lines, &line, "types")?.split('\t').collect()
        };
        let labels = LabelAlphabet::new(&types).map_err(|e| lines.err(e.to_string()))?;
        let line = lines.next_line()?;
        let dense_dim: usize = number(lines, field(lines, &line, "dense")?)?;
        let line = lines.next_line()?;
        let nf: usize = number(lines, field(lines, &line, "features")?)?;
        let mut names = Vec::with_capacity(nf);
        for _ in 0..nf {
            names.push(lines.next_line()?);
        }
        let features = FeatureAlphabet::from_names(names).map_err(|e| lines.err(e.to_string()))?;
        let mut model = CrfModel::zeros(labels, features, dense_dim);
        let line = lines.next_line()?;
        let nnz: usize = number(lines, field(lines, &line, "weights")?)?;
        for _ in 0..nnz {
            let line = lines.next_line()?;
            let (i, x) = line.split_once('\t').ok_or_else(|| lines.err("expected `coordinate<TAB>value`"))?;
            let i: usize = number(lines, i)?;
            let x: f64 = number(lines, x)?;
            if !x.is_finite() {
                return Err(lines.err("non-finite weight"));
            }
            let len = model.weights.len();
            *model.weights.get_mut(i).ok_or_else(|| lines.err(format!("coordinate {i} out of range {len}")))? = x;
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        check_writable(self)?;
        let mut w = util::create_writer(path)?;
        self.write(&mut w).map_err(|e| Error::io(path, e))?;
        util::flush(w, path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(util::open_reader(path)?, &path.display().to_string())
    }
}

fn check_writable(m: &CrfModel) -> Result<()> {
    match m.features.names().iter().find(|n| n.contains('\n') || n.contains('\r')) {
        Some(n) => Err(Error::InvalidArgument(format!("feature `{}` contains a line break", n.escape_debug()))),
        None => Ok(()),
    }
}

impl StackedModel {
    pub fn write<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{STACKED_MAGIC} {CRF_FORMAT_VERSION}")?;
        writeln!(w, "radius\t{}", self.radius)?;
        self.layer1.write_body(&mut w)?;
        self.layer2.write_body(&mut w)
    }

    pub fn read<R: BufRead>(reader: R, source: &str) -> Result<Self> {
        let mut lines = LineReader::new(reader, source);
        let m = Self::read_from(&mut lines)?;
        lines.expect_end()?;
        Ok(m)
    }

    /// Reads one stacked block, header included, leaving later lines unread.
    pub(crate) fn read_from<R: BufRead>(lines: &mut LineReader<R>) -> Result<Self> {
        check_magic(lines, STACKED_MAGIC)?;
        let line = lines.next_line()?;
        let radius = number(lines, field(lines, &line, "radius")?)?;
        let layer1 = CrfModel::read_body(lines)?;
        let layer2 = CrfModel::read_body(lines)?;
        if layer1.labels != layer2.labels || layer1.dense_dim != layer2.dense_dim {
            return Err(lines.err("stacked layers disagree on labels or dense width"));
        }
        Ok(StackedModel { layer1, layer2, radius })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        check_writable(&self.layer1)?;
        check_writable(&self.layer2)?;
        let mut w = util::create_writer(path)?;
        self.write(&mut w).map_err(|e| Error::io(path, e))?;
        util::flush(w, path)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read(util::open_reader(path)?, &path.display().to_string())
    }
}
