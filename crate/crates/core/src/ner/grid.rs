//! Development-set hyperparameter search.
//!
//! The grid is a TOML file mapping each tunable key to a list of candidate
//! values; omitted keys keep the base configuration's value:
//!
//! ```toml
//! eta    = [0.05, 0.1]
//! l1     = [1e-5, 1e-4]
//! l2     = [0.0]
//! epochs = [10]
//! scale  = [0.5, 1.0, 2.0]
//! refit  = true   # retrain the winner on train + dev
//! ```

use std::path::Path;

use serde::Deserialize;

use super::conll::Document;
use super::eval::{score_spans, EvalReport};
use super::features::Resources;
use super::tagger::{train_ner, NerModel, NerTrainConfig};
use crate::error::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub eta: Option<Vec<f64>>,
    pub l1: Option<Vec<f64>>,
    pub l2: Option<Vec<f64>>,
    pub epochs: Option<Vec<usize>>,
    pub scale: Option<Vec<f64>>,
    pub refit: Option<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridResult {
    pub config: NerTrainConfig,
    pub dev: EvalReport,
}

fn values<T: Copy>(name: &str, list: &Option<Vec<T>>, default: T) -> Result<Vec<T>> {
    match list {
        None => Ok(vec![default]),
        Some(v) if v.is_empty() => Err(Error::InvalidArgument(format!("grid key `{name}` has no values"))),
        Some(v) => Ok(v.clone()),
    }
}

impl GridConfig {
    pub fn parse(text: &str, source: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let line = e.span().map_or(0, |s| text[..s.start].matches('\n').count() + 1);
            Error::parse(source, line, e.message().to_owned())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Every combination of candidate values, in key order eta, l1, l2,
    /// epochs, scale (last key varying fastest).
    pub fn points(&self, base: &NerTrainConfig) -> Result<Vec<NerTrainConfig>> {
        let mut out = Vec::new();
        for eta in values("eta", &self.eta, base.crf.eta)? {
            for l1 in values("l1", &self.l1, base.crf.l1)? {
                for l2 in values("l2", &self.l2, base.crf.l2)? {
                    for epochs in values("epochs", &self.epochs, base.crf.epochs)? {
                        for scale in values("scale", &self.scale, base.features.scale)? {
                            let mut c = base.clone();
                            c.crf.eta = eta;
                            c.crf.l1 = l1;
                            c.crf.l2 = l2;
                            c.crf.epochs = epochs;
                            c.features.scale = scale;
                            out.push(c);
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Trains one model per grid point, scores each on `dev`, and returns the
/// best model (highest dev F1, earliest point on ties) with all results.
/// With `refit` the winner is retrained on train and dev together.
pub fn grid_search(
    train: &[Document],
    dev: &[Document],
    resources: &Resources,
    base: &NerTrainConfig,
    grid: &GridConfig,
) -> Result<(NerModel, Vec<GridResult>)> {
    let gold: Vec<_> = dev.iter().flat_map(|d| d.sentences.iter().map(|s| s.spans.clone())).collect();
    let mut results = Vec::new();
    let mut best: Option<(f64, NerModel, usize)> = None;
    for config in grid.points(base)? {
        let model = train_ner(train, resources, &config)?;
        let pred: Vec<_> = model.tag_all(dev, resources)?.into_iter().flatten().collect();
        let report = score_spans(&gold, &pred)?;
        let f1 = report.overall.f1;
        if best.as_ref().is_none_or(|b| f1 > b.0) {
            best = Some((f1, model, results.len()));
        }
        results.push(GridResult { config, dev: report });
    }
    let (_, model, index) = best.expect("grid has at least one point");
    if grid.refit.unwrap_or(true) {
        let all: Vec<Document> = train.iter().chain(dev).cloned().collect();
        return Ok((train_ner(&all, resources, &results[index].config)?, results));
    }
    Ok((model, results))
}
