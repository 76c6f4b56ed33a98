//! Real-valued functions on finite product spaces, stored as full tables.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gadget::space::FiniteSpace;

/// Largest table the exhaustive routines accept.
pub const TABLE_CAP: usize = 1 << 20;

/// `f: Ω₁ × … × Ω_t → ℝ`. Index is mixed radix with coordinate 0 least significant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TabulatedFunction {
    spaces: Vec<FiniteSpace>,
    values: Vec<f64>,
}

fn table_len(spaces: &[FiniteSpace]) -> Result<usize> {
    spaces.iter().try_fold(1usize, |acc, s| {
        acc.checked_mul(s.size()).filter(|&n| n <= TABLE_CAP).ok_or(Error::CapExceeded {
            what: "table entries".into(),
            needed: u64::MAX,
            cap: TABLE_CAP as u64,
        })
    })
}

impl TabulatedFunction {
    pub fn new(spaces: Vec<FiniteSpace>, values: Vec<f64>) -> Result<Self> {
        let len = table_len(&spaces)?;
        if values.len() != len {
            return Err(invalid(format!("table has {} values, domain has {len} points", values.len())));
        }
        Ok(TabulatedFunction { spaces, values })
    }

    pub fn from_fn(spaces: Vec<FiniteSpace>, f: impl Fn(&[usize]) -> f64) -> Result<Self> {
        let len = table_len(&spaces)?;
        let mut point = vec![0usize; spaces.len()];
        let mut values = Vec::with_capacity(len);
        for _ in 0..len {
            values.push(f(&point));
            for (c, s) in point.iter_mut().zip(&spaces) {
                *c += 1;
                if *c < s.size() {
                    break;
                }
                *c = 0;
            }
        }
        Ok(TabulatedFunction { spaces, values })
    }

    /// Function on `{0,1}^t` with every coordinate Bernoulli(`mu`).
    pub fn on_biased_cube(mu: f64, t: usize, values: Vec<f64>) -> Result<Self> {
        Self::new(vec![FiniteSpace::biased_bit(mu)?; t], values)
    }

    pub fn dims(&self) -> usize {
        self.spaces.len()
    }

    pub fn spaces(&self) -> &[FiniteSpace] {
        &self.spaces
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    fn stride(&self, i: usize) -> usize {
        self.spaces[..i].iter().map(FiniteSpace::size).product()
    }

    pub fn index(&self, point: &[usize]) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (c, s) in point.iter().zip(&self.spaces) {
            idx += c * stride;
            stride *= s.size();
        }
        idx
    }

    pub fn eval(&self, point: &[usize]) -> f64 {
        self.values[self.index(point)]
    }

    /// Probability of each table entry under the product measure.
    fn point_probs(&self) -> Vec<f64> {
        let mut probs = vec![1.0; self.values.len()];
        for (i, s) in self.spaces.iter().enumerate() {
            let stride = self.stride(i);
            for (idx, p) in probs.iter_mut().enumerate() {
                *p *= s.prob(idx / stride % s.size());
            }
        }
        probs
    }

    pub fn expectation(&self) -> f64 {
        self.point_probs().iter().zip(&self.values).map(|(p, v)| p * v).sum()
    }

    /// `E_x[Var_{x_i} f(x)]`.
    pub fn influence(&self, i: usize) -> Result<f64> {
        if i >= self.dims() {
            return Err(invalid(format!("coordinate {i} out of range")));
        }
        let s = &self.spaces[i];
        let stride = self.stride(i);
        let block = stride * s.size();
        let probs = self.point_probs();
        let mut total = 0.0;
        // Each fiber along coordinate i is {base + a·stride}; weight it by the
        // probability of its other coordinates.
        for base in (0..self.values.len()).filter(|idx| idx % block < stride) {
            let others = probs[base] / s.prob(0).max(f64::MIN_POSITIVE);
            let others = if s.prob(0) > 0.0 { others } else { fiber_weight(&probs, base, stride, s) };
            let mean: f64 = (0..s.size()).map(|a| s.prob(a) * self.values[base + a * stride]).sum();
            let var: f64 = (0..s.size()).map(|a| s.prob(a) * (self.values[base + a * stride] - mean).powi(2)).sum();
            total += others * var;
        }
        Ok(total)
    }

    /// `T_ρ f(x) = E[f(y)]` where each `y_i` equals `x_i` with probability `ρ` and is
    /// otherwise redrawn.
    pub fn noise(&self, rho: f64) -> Result<TabulatedFunction> {
        if !(0.0..=1.0).contains(&rho) {
            return Err(invalid(format!("noise rate {rho} outside [0, 1]")));
        }
        let mut values = self.values.clone();
        for (i, s) in self.spaces.iter().enumerate() {
            let stride = self.stride(i);
            let block = stride * s.size();
            for base in (0..values.len()).filter(|idx| idx % block < stride) {
                let mean: f64 = (0..s.size()).map(|a| s.prob(a) * values[base + a * stride]).sum();
                for a in 0..s.size() {
                    let v = &mut values[base + a * stride];
                    *v = rho * *v + (1.0 - rho) * mean;
                }
            }
        }
        Ok(TabulatedFunction { spaces: self.spaces.clone(), values })
    }
}

/// Probability of the other coordinates of a fiber, summed over the fiber itself.
fn fiber_weight(probs: &[f64], base: usize, stride: usize, s: &FiniteSpace) -> f64 {
    (0..s.size()).map(|a| probs[base + a * stride]).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dictator_influence() {
        let f = TabulatedFunction::from_fn(vec![FiniteSpace::biased_bit(0.3).unwrap(); 2], |x| x[0] as f64).unwrap();
        assert!((f.influence(0).unwrap() - 0.21).abs() < 1e-12);
        assert_eq!(f.influence(1).unwrap(), 0.0);
        assert!((f.expectation() - 0.3).abs() < 1e-12);
    }

    #[test]
    fn noise_semigroup_and_endpoints() {
        let spaces = vec![FiniteSpace::new(vec![0.2, 0.5, 0.3]).unwrap(), FiniteSpace::biased_bit(0.4).unwrap()];
        let f = TabulatedFunction::from_fn(spaces, |x| (x[0] * 2 + x[1]) as f64 / 5.0).unwrap();
        let a = f.noise(0.7).unwrap().noise(0.5).unwrap();
        let b = f.noise(0.35).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(f.noise(1.0).unwrap(), f);
        let e = f.expectation();
        assert!(f.noise(0.0).unwrap().values().iter().all(|&v| (v - e).abs() < 1e-12));
    }

    #[test]
    fn influence_with_zero_mass_point() {
        let spaces = vec![FiniteSpace::new(vec![0.0, 1.0]).unwrap(), FiniteSpace::biased_bit(0.5).unwrap()];
        let f = TabulatedFunction::from_fn(spaces, |x| x[1] as f64).unwrap();
        assert!((f.influence(1).unwrap() - 0.25).abs() < 1e-12);
        assert_eq!(f.influence(0).unwrap(), 0.0);
    }

    #[test]
    fn size_cap() {
        assert!(TabulatedFunction::from_fn(vec![FiniteSpace::biased_bit(0.5).unwrap(); 21], |_| 0.0).is_err());
    }
}
