//! BILOU label alphabet and span codec.
//!
//! Label ids: `O` is 0; entity type `i` (in alphabet order) owns
//! `B = 1 + 4i`, `I = 2 + 4i`, `L = 3 + 4i`, `U = 4 + 4i`.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Half-open entity span `[start, end)` over token positions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub kind: String,
}

impl Span {
    pub fn new(start: usize, end: usize, kind: impl Into<String>) -> Self {
        Span {
            start,
            end,
            kind: kind.into(),
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.start, self.end, self.kind)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Tag {
    Outside,
    Begin(usize),
    Inside(usize),
    Last(usize),
    Unit(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelAlphabet {
    types: Vec<String>,
    index: HashMap<String, usize>,
}

impl LabelAlphabet {
    /// Builds the alphabet over `types` in the given order. Duplicate or
    /// empty type names are rejected.
    pub fn new<S: AsRef<str>>(types: &[S]) -> Result<Self> {
        let mut index = HashMap::new();
        let mut names = Vec::with_capacity(types.len());
        for t in types {
            let t = t.as_ref();
            if t.is_empty() || t.chars().any(char::is_whitespace) {
                return Err(Error::InvalidArgument(format!("invalid entity type `{t}`")));
            }
            if index.insert(t.to_owned(), names.len()).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate entity type `{t}`")));
            }
            names.push(t.to_owned());
        }
        Ok(LabelAlphabet { types: names, index })
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn type_index(&self, kind: &str) -> Option<usize> {
        self.index.get(kind).copied()
    }

    /// Number of labels, `4 * types + 1`.
    pub fn len(&self) -> usize {
        4 * self.types.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn tag(&self, label: usize) -> Tag {
        if label == 0 {
            return Tag::Outside;
        }
        let t = (label - 1) / 4;
        match (label - 1) % 4 {
            0 => Tag::Begin(t),
            1 => Tag::Inside(t),
            2 => Tag::Last(t),
            _ => Tag::Unit(t),
        }
    }

    pub fn label(&self, tag: Tag) -> usize {
        match tag {
            Tag::Outside => 0,
            Tag::Begin(t) => 1 + 4 * t,
            Tag::Inside(t) => 2 + 4 * t,
            Tag::Last(t) => 3 + 4 * t,
            Tag::Unit(t) => 4 + 4 * t,
        }
    }

    /// Display name such as `B-PER` or `O`.
    pub fn name(&self, label: usize) -> String {
        match self.tag(label) {
            Tag::Outside => "O".to_owned(),
            Tag::Begin(t) => format!("B-{}", self.types[t]),
            Tag::Inside(t) => format!("I-{}", self.types[t]),
            Tag::Last(t) => format!("L-{}", self.types[t]),
            Tag::Unit(t) => format!("U-{}", self.types[t]),
        }
    }

    pub fn parse(&self, name: &str) -> Option<usize> {
        if name == "O" {
            return Some(0);
        }
        let (prefix, kind) = name.split_once('-')?;
        let t = self.type_index(kind)?;
        let tag = match prefix {
            "B" => Tag::Begin(t),
            "I" => Tag::Inside(t),
            "L" => Tag::Last(t),
            "U" => Tag::Unit(t),
            _ => return None,
        };
        Some(self.label(tag))
    }
}

/// Encodes spans as a BILOU label sequence of `length` positions.
pub fn encode_bilou(spans: &[Span], length: usize, alphabet: &LabelAlphabet) -> Result<Vec<usize>> {
    let mut labels = vec![0; length];
    let mut sorted: Vec<&Span> = spans.iter().collect();
    sorted.sort();
    for (i, s) in sorted.iter().enumerate() {
        if s.start >= s.end || s.end > length {
            return Err(Error::InvalidArgument(format!("span {s} outside sequence of length {length}")));
        }
        if let Some(prev) = i.checked_sub(1).map(|j| sorted[j]) {
            if prev.end > s.start {
                return Err(Error::OverlappingSpans(prev.start, prev.end, s.start, s.end));
            }
        }
        let t = alphabet
            .type_index(&s.kind)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown entity type `{}`", s.kind)))?;
        if s.end - s.start == 1 {
            labels[s.start] = alphabet.label(Tag::Unit(t));
        } else {
            labels[s.start] = alphabet.label(Tag::Begin(t));
            for l in &mut labels[s.start + 1..s.end - 1] {
                *l = alphabet.label(Tag::Inside(t));
            }
            labels[s.end - 1] = alphabet.label(Tag::Last(t));
        }
    }
    Ok(labels)
}

/// Decodes a possibly ill-formed label sequence into non-overlapping spans.
///
/// Repair rules: an `I`/`L` that does not continue an open entity of the
/// same type starts a new entity; an entity left open by `O`, `B`, `U`, a
/// type change, or the end of the sequence is closed where it stands.
pub fn decode_bilou(labels: &[usize], alphabet: &LabelAlphabet) -> Vec<Span> {
    let mut spans = Vec::new();
    let mut open: Option<(usize, usize)> = None;
    let close = |open: &mut Option<(usize, usize)>, end: usize, spans: &mut Vec<Span>| {
        if let Some((start, t)) = open.take() {
            spans.push(Span::new(start, end, alphabet.types[t].clone()));
        }
    };
    for (i, &label) in labels.iter().enumerate() {
        match alphabet.tag(label) {
            Tag::Outside => close(&mut open, i, &mut spans),
            Tag::Begin(t) => {
                close(&mut open, i, &mut spans);
                open = Some((i, t));
            }
            Tag::Inside(t) => {
                if !matches!(open, Some((_, u)) if u == t) {
                    close(&mut open, i, &mut spans);
                    open = Some((i, t));
                }
            }
            Tag::Last(t) => {
                if !matches!(open, Some((_, u)) if u == t) {
                    close(&mut open, i, &mut spans);
                    open = Some((i, t));
                }
                close(&mut open, i + 1, &mut spans);
            }
            Tag::Unit(t) => {
                close(&mut open, i, &mut spans);
                spans.push(Span::new(i, i + 1, alphabet.types[t].clone()));
            }
        }
    }
    close(&mut open, labels.len(), &mut spans);
    spans
}
