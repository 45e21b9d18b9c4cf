use super::{cosine, EmbeddingModel};
use crate::error::{Error, Result};
use crate::util::sigmoid;

pub const DEFAULT_ANALOGY_RESTRICT: usize = 30_000;

fn check_id(model: &EmbeddingModel, id: u32) -> Result<()> {
    let len = model.vocab().len();
    if id as usize >= len {
        return Err(Error::OutOfRange { id: id as usize, len });
    }
    Ok(())
}

/// Probability of `context` given `target` under the hierarchical softmax.
pub fn context_prob(model: &EmbeddingModel, target: u32, context: u32) -> Result<f64> {
    check_id(model, target)?;
    let path = model.tree().path_of(context)?;
    let e = model.leaf_vector(target);
    let mut p = 1.0;
    for (&inner, &label) in path.nodes.iter().zip(path.labels) {
        let w = model.node_vector(inner);
        let dot: f64 = w.iter().zip(e).map(|(&a, &b)| a as f64 * b as f64).sum();
        p *= sigmoid(label as f64 * dot);
    }
    Ok(p)
}

/// Top-`k` leaves by cosine similarity to `query`, excluding `query`
/// itself. `restrict` limits candidates to the most frequent ids.
pub fn nearest(model: &EmbeddingModel, query: u32, k: usize, restrict: Option<usize>) -> Result<Vec<(u32, f64)>> {
    check_id(model, query)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let q = model.leaf_vector(query);
    if q.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroNorm);
    }
    let limit = restrict.unwrap_or(usize::MAX).min(model.vocab().len());
    let mut scored: Vec<(u32, f64)> = (0..limit as u32)
        .filter(|&id| id != query)
        .map(|id| (id, cosine(q, model.leaf_vector(id))))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(scored)
}

/// Why an analogy question was not answered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SkipReason {
    /// A question word lies outside the candidate window.
    OutsideWindow,
    /// The offset vector `b - a + c` is zero.
    ZeroQuery,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnalogyAnswer {
    Answer(u32),
    Skipped(SkipReason),
}

/// Candidate index for repeated analogy queries over the `restrict` most
/// frequent ids.
pub struct AnalogySearcher<'a> {
    model: &'a EmbeddingModel,
    restrict: usize,
    unit: Vec<f64>,
}

impl<'a> AnalogySearcher<'a> {
    pub fn new(model: &'a EmbeddingModel, restrict: usize) -> Result<Self> {
        if restrict < 4 {
            return Err(Error::InvalidArgument("restrict must be at least 4".into()));
        }
        let restrict = restrict.min(model.vocab().len());
        let d = model.dim();
        let mut unit = Vec::with_capacity(restrict * d);
        for id in 0..restrict as u32 {
            let v = model.leaf_vector(id);
            let norm = v.iter().map(|&x| x as f64 * x as f64).sum::<f64>().sqrt();
            let scale = if norm > 0.0 { 1.0 / norm } else { 0.0 };
            unit.extend(v.iter().map(|&x| x as f64 * scale));
        }
        Ok(AnalogySearcher { model, restrict, unit })
    }

    /// Answers "a is to b as c is to ?" with the candidate maximizing the
    /// cosine to `b - a + c`, excluding the three question words.
    pub fn query(&self, a: u32, b: u32, c: u32) -> Result<AnalogyAnswer> {
        for id in [a, b, c] {
            check_id(self.model, id)?;
            if id as usize >= self.restrict {
                return Ok(AnalogyAnswer::Skipped(SkipReason::OutsideWindow));
            }
        }
        let d = self.model.dim();
        let (va, vb, vc) = (self.model.leaf_vector(a), self.model.leaf_vector(b), self.model.leaf_vector(c));
        let x: Vec<f64> = (0..d).map(|k| vb[k] as f64 - va[k] as f64 + vc[k] as f64).collect();
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(AnalogyAnswer::Skipped(SkipReason::ZeroQuery));
        }
        let mut best: Option<(u32, f64)> = None;
        for id in 0..self.restrict as u32 {
            if id == a || id == b || id == c {
                continue;
            }
            let u = &self.unit[id as usize * d..(id as usize + 1) * d];
            let score = u.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() / norm;
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((id, score));
            }
        }
        Ok(match best {
            Some((id, _)) => AnalogyAnswer::Answer(id),
            None => AnalogyAnswer::Skipped(SkipReason::OutsideWindow),
        })
    }
}

pub fn analogy_query(model: &EmbeddingModel, a: u32, b: u32, c: u32, restrict: usize) -> Result<AnalogyAnswer> {
    AnalogySearcher::new(model, restrict)?.query(a, b, c)
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct AnalogyReport {
    pub correct: usize,
    pub answered: usize,
    pub skipped: usize,
    /// `correct / answered`, or 0 when nothing was answered.
    pub accuracy: f64,
}

impl AnalogyReport {
    /// Accumulates another report's counts and refreshes the accuracy.
    pub fn add(&mut self, other: &AnalogyReport) {
        self.correct += other.correct;
        self.answered += other.answered;
        self.skipped += other.skipped;
        self.refresh();
    }

    fn refresh(&mut self) {
        self.accuracy = if self.answered == 0 { 0.0 } else { self.correct as f64 / self.answered as f64 };
    }
}

/// Scores `(a, b, c, expected)` questions. Questions whose expected answer
/// lies outside the window are skipped along with those
/// [`AnalogySearcher::query`] skips.
pub fn eval_analogy(model: &EmbeddingModel, questions: &[[u32; 4]], restrict: usize) -> Result<AnalogyReport> {
    let searcher = AnalogySearcher::new(model, restrict)?;
    let mut report = AnalogyReport::default();
    for &[a, b, c, expected] in questions {
        check_id(model, expected)?;
        if expected as usize >= searcher.restrict {
            report.skipped += 1;
            continue;
        }
        match searcher.query(a, b, c)? {
            AnalogyAnswer::Answer(id) => {
                report.answered += 1;
                if id == expected {
                    report.correct += 1;
                }
            }
            AnalogyAnswer::Skipped(_) => report.skipped += 1,
        }
    }
    report.refresh();
    Ok(report)
}
