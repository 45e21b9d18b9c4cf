//! Exact linear-chain inference in log space.
//!
//! All routines operate on a [`Scores`] table: per-position unary scores
//! and one label-pair transition matrix. The score of a label sequence `y`
//! is `Σ_t unary[t][y_t] + Σ_{t>0} trans[y_{t-1}][y_t]`.

use crate::util::log_sum_exp;

#[derive(Clone, Debug, PartialEq)]
pub struct Scores {
    pub labels: usize,
    /// Row-major `T x L`.
    pub unary: Vec<f64>,
    /// Row-major `L x L`, indexed `[previous][current]`.
    pub trans: Vec<f64>,
}

impl Scores {
    pub fn new(labels: usize, unary: Vec<f64>, trans: Vec<f64>) -> Self {
        assert!(labels > 0 && unary.len().is_multiple_of(labels) && trans.len() == labels * labels);
        Scores { labels, unary, trans }
    }

    pub fn len(&self) -> usize {
        self.unary.len() / self.labels
    }

    pub fn is_empty(&self) -> bool {
        self.unary.is_empty()
    }

    pub fn unary(&self, t: usize, y: usize) -> f64 {
        self.unary[t * self.labels + y]
    }

    pub fn trans(&self, prev: usize, cur: usize) -> f64 {
        self.trans[prev * self.labels + cur]
    }
}

/// Node marginals `p(y_t = y)` and transition marginals summed over
/// positions, `Σ_t p(y_{t-1} = a, y_t = b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Marginals {
    pub log_z: f64,
    pub node: Vec<f64>,
    pub edge: Vec<f64>,
}

pub fn sequence_score(scores: &Scores, labels: &[usize]) -> f64 {
    let mut s = 0.0;
    for (t, &y) in labels.iter().enumerate() {
        s += scores.unary(t, y);
        if t > 0 {
            s += scores.trans(labels[t - 1], y);
        }
    }
    s
}

fn forward(scores: &Scores) -> Vec<f64> {
    let (n, l) = (scores.len(), scores.labels);
    let mut alpha = vec![0.0; n * l];
    alpha[..l].copy_from_slice(&scores.unary[..l]);
    let mut buf = vec![0.0; l];
    for t in 1..n {
        for y in 0..l {
            for (p, b) in buf.iter_mut().enumerate() {
                *b = alpha[(t - 1) * l + p] + scores.trans(p, y);
            }
            alpha[t * l + y] = log_sum_exp(&buf) + scores.unary(t, y);
        }
    }
    alpha
}

fn backward(scores: &Scores) -> Vec<f64> {
    let (n, l) = (scores.len(), scores.labels);
    let mut beta = vec![0.0; n * l];
    let mut buf = vec![0.0; l];
    for t in (0..n.saturating_sub(1)).rev() {
        for y in 0..l {
            for (nx, b) in buf.iter_mut().enumerate() {
                *b = scores.trans(y, nx) + scores.unary(t + 1, nx) + beta[(t + 1) * l + nx];
            }
            beta[t * l + y] = log_sum_exp(&buf);
        }
    }
    beta
}

/// Log partition function; 0 for an empty sequence.
pub fn log_partition(scores: &Scores) -> f64 {
    let n = scores.len();
    if n == 0 {
        return 0.0;
    }
    let alpha = forward(scores);
    log_sum_exp(&alpha[(n - 1) * scores.labels..])
}

pub fn forward_backward(scores: &Scores) -> Marginals {
    let (n, l) = (scores.len(), scores.labels);
    if n == 0 {
        return Marginals {
            log_z: 0.0,
            node: vec![],
            edge: vec![0.0; l * l],
        };
    }
    let alpha = forward(scores);
    let beta = backward(scores);
    let log_z = log_sum_exp(&alpha[(n - 1) * l..]);
    let node = alpha.iter().zip(&beta).map(|(a, b)| (a + b - log_z).exp()).collect();
    let mut edge = vec![0.0; l * l];
    for t in 1..n {
        for p in 0..l {
            let a = alpha[(t - 1) * l + p];
            for y in 0..l {
                edge[p * l + y] += (a + scores.trans(p, y) + scores.unary(t, y) + beta[t * l + y] - log_z).exp();
            }
        }
    }
    Marginals { log_z, node, edge }
}

/// Highest-scoring label sequence. Ties prefer the lower label index,
/// deciding from the last position backwards.
pub fn viterbi(scores: &Scores) -> Vec<usize> {
    let (n, l) = (scores.len(), scores.labels);
    if n == 0 {
        return vec![];
    }
    let mut delta = scores.unary[..l].to_vec();
    let mut back = vec![0usize; n * l];
    let mut next = vec![0.0; l];
    for t in 1..n {
        for y in 0..l {
            let (mut best, mut arg) = (f64::NEG_INFINITY, 0);
            for (p, &d) in delta.iter().enumerate() {
                let s = d + scores.trans(p, y);
                if s > best {
                    best = s;
                    arg = p;
                }
            }
            next[y] = best + scores.unary(t, y);
            back[t * l + y] = arg;
        }
        std::mem::swap(&mut delta, &mut next);
    }
    let mut y = 0;
    for (k, &d) in delta.iter().enumerate() {
        if d > delta[y] {
            y = k;
        }
    }
    let mut path = vec![0; n];
    path[n - 1] = y;
    for t in (1..n).rev() {
        y = back[t * l + y];
        path[t - 1] = y;
    }
    path
}

#[cfg(test)]
pub(crate) mod brute {
    use super::*;

    /// Every label sequence of length `n` over `l` labels.
    pub fn sequences(n: usize, l: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|s| {
                    (0..l).map(move |y| {
                        let mut s = s.clone();
                        s.push(y);
                        s
                    })
                })
                .collect();
        }
        out
    }

    pub fn log_partition(scores: &Scores) -> f64 {
        let all: Vec<f64> = sequences(scores.len(), scores.labels).iter().map(|s| sequence_score(scores, s)).collect();
        log_sum_exp(&all)
    }
}
