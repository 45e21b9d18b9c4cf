//! AdaGrad regularized dual averaging with ℓ1 and ℓ2 terms.
//!
//! The state keeps, per coordinate, the running sum of loss gradients ḡ
//! and of their squares G, plus the step count t. Weights are a closed
//! form of that state, so untouched coordinates need no per-step work:
//!
//! ```text
//! m   = ḡ_i / t
//! w_i = 0                                              if |m| ≤ λ1
//! w_i = −sign(m)·(|m| − λ1)·t·η / (√G_i + λ2·t·η)      otherwise
//! ```

use super::model::WeightSource;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct RdaState {
    grad_sum: Vec<f64>,
    sq_sum: Vec<f64>,
    t: u64,
    l1: f64,
    l2: f64,
    eta: f64,
}

impl RdaState {
    pub fn new(dim: usize, eta: f64, l1: f64, l2: f64) -> Result<Self> {
        if !(eta > 0.0 && eta.is_finite()) {
            return Err(Error::InvalidArgument(format!("learning rate must be positive, got {eta}")));
        }
        if !(l1 >= 0.0 && l2 >= 0.0 && l1.is_finite() && l2.is_finite()) {
            return Err(Error::InvalidArgument("regularization strengths must be non-negative".into()));
        }
        Ok(RdaState {
            grad_sum: vec![0.0; dim],
            sq_sum: vec![0.0; dim],
            t: 0,
            l1,
            l2,
            eta,
        })
    }

    /// Restores a state from explicit sums, e.g. for hand-computed checks.
    pub fn from_parts(grad_sum: Vec<f64>, sq_sum: Vec<f64>, t: u64, eta: f64, l1: f64, l2: f64) -> Result<Self> {
        if grad_sum.len() != sq_sum.len() {
            return Err(Error::DimensionMismatch { expected: grad_sum.len(), found: sq_sum.len() });
        }
        if sq_sum.iter().any(|&g| g < 0.0) {
            return Err(Error::InvalidArgument("squared-gradient sums must be non-negative".into()));
        }
        let mut s = Self::new(grad_sum.len(), eta, l1, l2)?;
        s.grad_sum = grad_sum;
        s.sq_sum = sq_sum;
        s.t = t;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.grad_sum.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grad_sum.is_empty()
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn grad_sum(&self) -> &[f64] {
        &self.grad_sum
    }

    pub fn sq_sum(&self) -> &[f64] {
        &self.sq_sum
    }

    /// Advances one step with the sparse gradient of the loss (to be
    /// minimized). Coordinates absent from `grad` receive a zero gradient.
    pub fn step(&mut self, grad: &[(usize, f64)]) {
        self.t += 1;
        for &(i, g) in grad {
            self.grad_sum[i] += g;
            self.sq_sum[i] += g * g;
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.weight(i)).collect()
    }
}

impl WeightSource for RdaState {
    fn weight(&self, i: usize) -> f64 {
        let g = self.grad_sum[i];
        if self.t == 0 || g == 0.0 {
            return 0.0;
        }
        let t = self.t as f64;
        let m = g / t;
        if m.abs() <= self.l1 {
            return 0.0;
        }
        let te = t * self.eta;
        -(m.signum() * (m.abs() - self.l1) * te) / (self.sq_sum[i].sqrt() + self.l2 * te)
    }
}

/// Applies one RDA step and returns the resulting dense weights.
pub fn rda_update(state: &mut RdaState, grad: &[(usize, f64)]) -> Vec<f64> {
    state.step(grad);
    state.weights()
}
