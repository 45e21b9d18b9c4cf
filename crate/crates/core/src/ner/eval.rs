//! Exact-match span precision, recall and F1.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::crf::Span;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Prf {
    pub gold: usize,
    pub predicted: usize,
    pub correct: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn from_counts(gold: usize, predicted: usize, correct: usize) -> Self {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let precision = ratio(correct, predicted);
        let recall = ratio(correct, gold);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf {
            gold,
            predicted,
            correct,
            precision,
            recall,
            f1,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EvalReport {
    pub per_type: BTreeMap<String, Prf>,
    pub overall: Prf,
}

impl fmt::Display for EvalReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<10} {:>9} {:>9} {:>9} {:>6} {:>6} {:>6}", "type", "precision", "recall", "f1", "gold", "pred", "ok")?;
        let rows = self.per_type.iter().map(|(k, v)| (k.as_str(), v)).chain([("overall", &self.overall)]);
        for (name, p) in rows {
            writeln!(
                f,
                "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>6} {:>6} {:>6}",
                name, p.precision, p.recall, p.f1, p.gold, p.predicted, p.correct
            )?;
        }
        Ok(())
    }
}

/// Scores aligned lists of per-sentence span sets. A predicted span is
/// correct iff a gold span in the same sentence has the same start, end
/// and type. Duplicate spans within a sentence count once.
pub fn score_spans(gold: &[Vec<Span>], pred: &[Vec<Span>]) -> Result<EvalReport> {
    if gold.len() != pred.len() {
        return Err(Error::DimensionMismatch {
            expected: gold.len(),
            found: pred.len(),
        });
    }
    let mut counts: BTreeMap<String, [usize; 3]> = BTreeMap::new();
    for (g, p) in gold.iter().zip(pred) {
        let g: HashSet<&Span> = g.iter().collect();
        let p: HashSet<&Span> = p.iter().collect();
        for s in &g {
            counts.entry(s.kind.clone()).or_default()[0] += 1;
        }
        for s in &p {
            let c = counts.entry(s.kind.clone()).or_default();
            c[1] += 1;
            if g.contains(s) {
                c[2] += 1;
            }
        }
    }
    let mut total = [0; 3];
    let per_type = counts
        .into_iter()
        .map(|(k, c)| {
            for i in 0..3 {
                total[i] += c[i];
            }
            (k, Prf::from_counts(c[0], c[1], c[2]))
        })
        .collect();
    Ok(EvalReport {
        per_type,
        overall: Prf::from_counts(total[0], total[1], total[2]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hand_case() {
        let gold = vec![vec![Span::new(0, 1, "PER"), Span::new(3, 4, "LOC")]];
        let pred = vec![vec![Span::new(0, 1, "PER")]];
        let r = score_spans(&gold, &pred).unwrap();
        assert_eq!(r.overall.precision, 1.0);
        assert_eq!(r.overall.recall, 0.5);
        assert!((r.overall.f1 - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(r.per_type["LOC"].recall, 0.0);
        let same = score_spans(&gold, &gold).unwrap();
        assert_eq!((same.overall.precision, same.overall.recall, same.overall.f1), (1.0, 1.0, 1.0));
    }

    #[test]
    fn type_mismatch_and_lengths() {
        let r = score_spans(&[vec![Span::new(0, 2, "PER")]], &[vec![Span::new(0, 2, "ORG")]]).unwrap();
        assert_eq!(r.overall.correct, 0);
        assert_eq!(r.overall.f1, 0.0);
        assert!(score_spans(&[vec![]], &[]).is_err());
        let empty = score_spans(&[], &[]).unwrap();
        assert_eq!(empty.overall.f1, 0.0);
    }

    /// Brute-force scorer: flatten to (sentence, start, end, type) tuples
    /// and count matches by linear search.
    fn brute(gold: &[Vec<Span>], pred: &[Vec<Span>]) -> (usize, usize, usize) {
        let flat = |x: &[Vec<Span>]| {
            let mut v: Vec<(usize, usize, usize, String)> = Vec::new();
            for (i, s) in x.iter().enumerate() {
                for sp in s {
                    let t = (i, sp.start, sp.end, sp.kind.clone());
                    if !v.contains(&t) {
                        v.push(t);
                    }
                }
            }
            v
        };
        let (g, p) = (flat(gold), flat(pred));
        let correct = p.iter().filter(|x| g.contains(x)).count();
        (g.len(), p.len(), correct)
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let kinds = ["A", "B", "C"];
        let gen = |rng: &mut ChaCha8Rng| -> Vec<Span> {
            (0..rng.gen_range(0..4))
                .map(|_| {
                    let s = rng.gen_range(0..5);
                    Span::new(s, s + rng.gen_range(1..3), kinds[rng.gen_range(0..3)])
                })
                .collect()
        };
        for _ in 0..300 {
            let n = rng.gen_range(0..4);
            let gold: Vec<Vec<Span>> = (0..n).map(|_| gen(&mut rng)).collect();
            let pred: Vec<Vec<Span>> = (0..n).map(|_| gen(&mut rng)).collect();
            let r = score_spans(&gold, &pred).unwrap();
            let (g, p, c) = brute(&gold, &pred);
            assert_eq!((r.overall.gold, r.overall.predicted, r.overall.correct), (g, p, c));
        }
    }
}
