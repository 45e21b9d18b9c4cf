//! Feature alphabet and sequence instances.

use std::collections::HashMap;

use crate::error::{Error, Result};

/// Interning table from feature strings to dense ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeatureAlphabet {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl FeatureAlphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_names(names: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i as u32).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate feature `{n}`")));
            }
        }
        Ok(FeatureAlphabet { names, index })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<u32> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn intern(&mut self, name: &str) -> u32 {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_owned());
        self.index.insert(name.to_owned(), id);
        id
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }
}

/// One token: surface form, active binary features, and an optional dense
/// feature block (empty when the dataset has no dense features).
#[derive(Clone, Debug, PartialEq)]
pub struct Token {
    pub form: String,
    pub features: Vec<u32>,
    pub dense: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SequenceInstance {
    pub tokens: Vec<Token>,
    pub gold: Option<Vec<usize>>,
}

impl SequenceInstance {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Checks feature ids, dense widths and gold labels against a model
    /// layout.
    pub fn validate(&self, features: usize, dense_dim: usize, labels: usize) -> Result<()> {
        for tok in &self.tokens {
            if let Some(&f) = tok.features.iter().find(|&&f| f as usize >= features) {
                return Err(Error::OutOfRange { id: f as usize, len: features });
            }
            if tok.dense.len() != dense_dim {
                return Err(Error::DimensionMismatch { expected: dense_dim, found: tok.dense.len() });
            }
        }
        if let Some(gold) = &self.gold {
            if gold.len() != self.tokens.len() {
                return Err(Error::DimensionMismatch { expected: self.tokens.len(), found: gold.len() });
            }
            if let Some(&l) = gold.iter().find(|&&l| l >= labels) {
                return Err(Error::OutOfRange { id: l, len: labels });
            }
        }
        Ok(())
    }
}

/// A sequence whose features are still strings; interned against an
/// alphabet to produce a [`SequenceInstance`].
#[derive(Clone, Debug, PartialEq)]
pub struct RawSequence {
    pub tokens: Vec<String>,
    pub features: Vec<Vec<String>>,
    pub dense: Vec<Vec<f64>>,
    pub gold: Option<Vec<usize>>,
}

impl RawSequence {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Interns features, growing the alphabet.
    pub fn intern(&self, alphabet: &mut FeatureAlphabet) -> SequenceInstance {
        self.build(|f| Some(alphabet.intern(f)))
    }

    /// Looks features up in a frozen alphabet, dropping unknown ones.
    pub fn lookup(&self, alphabet: &FeatureAlphabet) -> SequenceInstance {
        self.build(|f| alphabet.get(f))
    }

    fn build(&self, mut id: impl FnMut(&str) -> Option<u32>) -> SequenceInstance {
        let tokens = self
            .tokens
            .iter()
            .enumerate()
            .map(|(i, form)| {
                let mut features: Vec<u32> = self.features[i].iter().filter_map(|f| id(f)).collect();
                features.sort_unstable();
                features.dedup();
                Token {
                    form: form.clone(),
                    features,
                    dense: self.dense.get(i).cloned().unwrap_or_default(),
                }
            })
            .collect();
        SequenceInstance {
            tokens,
            gold: self.gold.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn raw() -> RawSequence {
        RawSequence {
            tokens: vec!["a".into(), "b".into()],
            features: vec![vec!["x".into(), "y".into(), "x".into()], vec!["z".into()]],
            dense: vec![],
            gold: Some(vec![0, 1]),
        }
    }

    #[test]
    fn intern_and_lookup() {
        let mut a = FeatureAlphabet::new();
        let inst = raw().intern(&mut a);
        assert_eq!(a.len(), 3);
        assert_eq!(inst.tokens[0].features, vec![0, 1]);
        assert_eq!(inst.tokens[1].features, vec![2]);
        let frozen = FeatureAlphabet::from_names(vec!["z".into()]).unwrap();
        let inst = raw().lookup(&frozen);
        assert!(inst.tokens[0].features.is_empty());
        assert_eq!(inst.tokens[1].features, vec![0]);
        assert!(FeatureAlphabet::from_names(vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn validation() {
        let mut a = FeatureAlphabet::new();
        let inst = raw().intern(&mut a);
        assert!(inst.validate(3, 0, 2).is_ok());
        assert!(inst.validate(2, 0, 2).is_err());
        assert!(inst.validate(3, 1, 2).is_err());
        assert!(inst.validate(3, 0, 1).is_err());
    }
}
