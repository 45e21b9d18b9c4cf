use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

pub(crate) fn open_reader(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

pub(crate) fn create_writer(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

/// Reads non-empty, trimmed lines from a file.
pub(crate) fn read_entries(path: &Path) -> Result<Vec<String>> {
    let reader = open_reader(path)?;
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if !line.is_empty() {
            out.push(line.to_owned());
        }
    }
    Ok(out)
}

/// Line iterator that tracks 1-based line numbers for parse errors.
pub(crate) struct LineReader<R> {
    inner: std::io::Lines<R>,
    source: String,
    pub(crate) line: usize,
    pending: Option<String>,
}

impl<R: BufRead> LineReader<R> {
    pub(crate) fn new(reader: R, source: &str) -> Self {
        LineReader {
            inner: reader.lines(),
            source: source.to_owned(),
            line: 0,
            pending: None,
        }
    }

    pub(crate) fn next_line(&mut self) -> Result<String> {
        self.line += 1;
        if let Some(l) = self.pending.take() {
            return Ok(l);
        }
        match self.inner.next() {
            Some(Ok(l)) => Ok(l),
            Some(Err(e)) => Err(Error::parse(&self.source, self.line, e.to_string())),
            None => Err(Error::parse(&self.source, self.line, "unexpected end of file")),
        }
    }

    /// Returns `line` to the stream; the next `next_line` yields it again.
    pub(crate) fn push_back(&mut self, line: String) {
        debug_assert!(self.pending.is_none());
        self.line -= 1;
        self.pending = Some(line);
    }

    pub(crate) fn expect_end(&mut self) -> Result<()> {
        if let Some(l) = self.pending.take() {
            self.line += 1;
            if !l.trim().is_empty() {
                return Err(Error::parse(&self.source, self.line, "unexpected trailing content"));
            }
        }
        for l in self.inner.by_ref() {
            self.line += 1;
            let l = l.map_err(|e| Error::parse(&self.source, self.line, e.to_string()))?;
            if !l.trim().is_empty() {
                return Err(Error::parse(&self.source, self.line, "unexpected trailing content"));
            }
        }
        Ok(())
    }

    pub(crate) fn err(&self, msg: impl Into<String>) -> Error {
        Error::parse(&self.source, self.line, msg)
    }
}

pub(crate) fn flush(mut w: impl Write, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let z = x.exp();
        z / (1.0 + z)
    }
}

/// `log(sigmoid(x))`, stable for large |x|.
#[inline]
pub(crate) fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

pub(crate) fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}
