//! CoNLL column-format ingestion and tagged output.
//!
//! Tokens are whitespace-separated columns with the token in the first
//! column and a BIO/IOB gold tag in the last. Blank lines end sentences and
//! `-DOCSTART-` lines end documents. Both IOB1 (`I-` may open an entity)
//! and IOB2 (`B-` always opens) are accepted; tags become spans.

use std::io::{BufRead, Write};
use std::path::Path;

use crate::crf::Span;
use crate::error::{Error, Result};
use crate::util;

pub const DOCSTART: &str = "-DOCSTART-";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    pub tokens: Vec<String>,
    /// Original columns of each token line, tag column included.
    pub columns: Vec<Vec<String>>,
    pub spans: Vec<Span>,
}

impl Sentence {
    /// Builds a sentence with single-column token lines.
    pub fn from_tokens(tokens: Vec<String>, spans: Vec<Span>) -> Self {
        let columns = tokens.iter().map(|t| vec![t.clone()]).collect();
        Sentence { tokens, columns, spans }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Document {
    /// Zero-based position of the document in its file.
    pub id: usize,
    pub sentences: Vec<Sentence>,
}

impl Document {
    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Bio<'a> {
    Outside,
    Begin(&'a str),
    Inside(&'a str),
}

fn parse_tag(tag: &str) -> Option<Bio<'_>> {
    if tag == "O" {
        return Some(Bio::Outside);
    }
    match tag.split_once('-') {
        Some(("B", t)) if !t.is_empty() => Some(Bio::Begin(t)),
        Some(("I", t)) if !t.is_empty() => Some(Bio::Inside(t)),
        _ => None,
    }
}

/// Converts a BIO/IOB tag sequence to spans. `Err(i)` names the first
/// unparseable tag.
pub fn iob_to_spans<S: AsRef<str>>(tags: &[S]) -> std::result::Result<Vec<Span>, usize> {
    let mut spans = Vec::new();
    let mut open: Option<(usize, &str)> = None;
    for (i, tag) in tags.iter().enumerate() {
        let tag = parse_tag(tag.as_ref()).ok_or(i)?;
        match tag {
            Bio::Inside(t) if matches!(open, Some((_, u)) if u == t) => continue,
            _ => {}
        }
        if let Some((s, t)) = open.take() {
            spans.push(Span::new(s, i, t));
        }
        match tag {
            Bio::Outside => {}
            Bio::Begin(t) | Bio::Inside(t) => open = Some((i, t)),
        }
    }
    if let Some((s, t)) = open {
        spans.push(Span::new(s, tags.len(), t));
    }
    Ok(spans)
}

/// Renders spans as IOB2 tags over `length` tokens.
pub fn spans_to_bio(spans: &[Span], length: usize) -> Vec<String> {
    let mut tags = vec!["O".to_owned(); length];
    for s in spans {
        for (i, tag) in tags.iter_mut().enumerate().take(s.end).skip(s.start) {
            *tag = format!("{}-{}", if i == s.start { "B" } else { "I" }, s.kind);
        }
    }
    tags
}

pub fn parse_conll<R: BufRead>(reader: R, source: &str) -> Result<Vec<Document>> {
    let mut docs = Vec::new();
    let mut doc = Document::default();
    let mut sentence: Vec<(usize, Vec<String>)> = Vec::new();

    let finish_sentence = |sentence: &mut Vec<(usize, Vec<String>)>, doc: &mut Document| -> Result<()> {
        if sentence.is_empty() {
            return Ok(());
        }
        let tags: Vec<&str> = sentence.iter().map(|(_, c)| c.last().unwrap().as_str()).collect();
        let spans = iob_to_spans(&tags).map_err(|i| {
            Error::parse(source, sentence[i].0, format!("malformed tag `{}`", tags[i]))
        })?;
        let columns: Vec<Vec<String>> = sentence.drain(..).map(|(_, c)| c).collect();
        doc.sentences.push(Sentence {
            tokens: columns.iter().map(|c| c[0].clone()).collect(),
            columns,
            spans,
        });
        Ok(())
    };

    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| Error::parse(source, line_no, e.to_string()))?;
        let cols: Vec<String> = line.split_whitespace().map(str::to_owned).collect();
        if cols.is_empty() {
            finish_sentence(&mut sentence, &mut doc)?;
        } else if cols[0] == DOCSTART {
            finish_sentence(&mut sentence, &mut doc)?;
            if !doc.sentences.is_empty() {
                docs.push(std::mem::take(&mut doc));
            }
        } else if cols.len() < 2 {
            return Err(Error::parse(source, line_no, "expected a token and a tag column"));
        } else {
            sentence.push((line_no, cols));
        }
    }
    finish_sentence(&mut sentence, &mut doc)?;
    if !doc.sentences.is_empty() {
        docs.push(doc);
    }
    for (i, d) in docs.iter_mut().enumerate() {
        d.id = i;
    }
    Ok(docs)
}

pub fn read_conll(path: &Path) -> Result<Vec<Document>> {
    parse_conll(util::open_reader(path)?, &path.display().to_string())
}

/// Writes documents with each token line's original columns plus one
/// predicted IOB2 tag column. `predicted[d][s]` holds the spans of
/// sentence `s` of document `d`.
pub fn write_tagged<W: Write>(mut w: W, docs: &[Document], predicted: &[Vec<Vec<Span>>]) -> std::io::Result<()> {
    for (doc, pred) in docs.iter().zip(predicted) {
        writeln!(w, "{DOCSTART} -X- -X- O")?;
        writeln!(w)?;
        for (sentence, spans) in doc.sentences.iter().zip(pred) {
            let tags = spans_to_bio(spans, sentence.len());
            for (cols, tag) in sentence.columns.iter().zip(tags) {
                writeln!(w, "{} {}", cols.join(" "), tag)?;
            }
            writeln!(w)?;
        }
    }
    Ok(())
}
