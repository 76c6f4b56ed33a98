//! Finite probability spaces and correlated draws over them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// A distribution on `{0, …, k-1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct FiniteSpace {
    probs: Vec<f64>,
    cumulative: Vec<f64>,
}

impl TryFrom<Vec<f64>> for FiniteSpace {
    type Error = crate::Error;
    fn try_from(p: Vec<f64>) -> Result<Self> {
        FiniteSpace::new(p)
    }
}

impl From<FiniteSpace> for Vec<f64> {
    fn from(s: FiniteSpace) -> Vec<f64> {
        s.probs
    }
}

impl FiniteSpace {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() || probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(invalid("probabilities must be finite, non-negative and non-empty"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(invalid(format!("probabilities sum to {total}, not 1")));
        }
        let mut acc = 0.0;
        let cumulative = probs
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        Ok(FiniteSpace { probs, cumulative })
    }

    /// `{0,1}` with `Pr[1] = mu`.
    pub fn biased_bit(mu: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu) {
            return Err(invalid(format!("bias {mu} outside [0, 1]")));
        }
        Self::new(vec![1.0 - mu, mu])
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid("uniform space needs at least one point"));
        }
        Self::new(vec![1.0 / k as f64; k])
    }

    pub fn size(&self) -> usize {
        self.probs.len()
    }

    pub fn prob(&self, a: usize) -> f64 {
        self.probs[a]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        let k = self.cumulative.partition_point(|&c| c <= u);
        // Rounding can leave the last cumulative just below 1; fall back to the last
        // point with positive mass.
        k.min(self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0))
    }
}

/// Keep `x` with probability `rho`, otherwise redraw from the space.
pub fn correlated_copy<R: Rng>(space: &FiniteSpace, x: usize, rho: f64, rng: &mut R) -> usize {
    if rng.gen_bool(rho) {
        x
    } else {
        space.sample(rng)
    }
}

/// `r` draws that, with probability `rho`, all equal one shared draw, and are
/// otherwise independent.
pub fn sample_correlated<R: Rng>(space: &FiniteSpace, r: usize, rho: f64, rng: &mut R) -> Result<Vec<usize>> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(invalid(format!("correlation {rho} outside [0, 1]")));
    }
    if rng.gen_bool(rho) {
        let a = space.sample(rng);
        Ok(vec![a; r])
    } else {
        Ok((0..r).map(|_| space.sample(rng)).collect())
    }
}
