//! Embedding a uniform DkSH instance into a CSP over an arbitrary predicate, using a
//! minimal accepting string and heavy dummy vertices that can never be labeled 1.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::instance::{CspInstance, Hypergraph, Labeling, WEIGHT_TOL};
use crate::predicate::Predicate;

/// The produced CSP plus what is needed to map labelings back.
#[derive(Clone, Debug, Serialize)]
pub struct DkshToPredicate {
    #[serde(skip)]
    pub instance: CspInstance,
    /// Bias for the produced instance.
    pub bias: f64,
    /// Edge coordinates that receive the original edge's vertices, in order.
    pub one_positions: Vec<usize>,
    /// Edge coordinates that receive the dummies, in order.
    pub zero_positions: Vec<usize>,
    /// Dummy vertex ids, one per zero coordinate.
    pub dummies: Vec<usize>,
    pub dummy_weight: f64,
    pub original_n: usize,
}

/// Build the CSP. `beta` must be a minimal accepting string of `psi` whose weight
/// equals the arity of every edge of `h`; `h` must have uniform vertex weights.
pub fn dksh_to_predicate(h: &Hypergraph, psi: &Predicate, beta: usize, mu: f64) -> Result<DkshToPredicate> {
    let r = psi.arity();
    if beta >= 1 << r {
        return Err(invalid(format!("beta index {beta} out of range for arity {r}")));
    }
    if !psi.minimal_elements().contains(&beta) {
        return Err(Error::Precondition(format!("{} is not a minimal accepting string", psi.bitstring(beta))));
    }
    let i_star = beta.count_ones() as usize;
    if i_star == 0 {
        return Err(Error::Precondition("beta must have at least one 1".into()));
    }
    if let Some(k) = h.edges().iter().position(|e| e.len() != i_star) {
        return Err(Error::Precondition(format!("edge {k} has {} vertices, beta has weight {i_star}", h.edges()[k].len())));
    }
    if !h.is_uniform() {
        return Err(Error::Precondition("vertex weights must be uniform".into()));
    }
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::InfeasibleBias(format!("bias {mu} outside (0, 1)")));
    }

    let n = h.n();
    let (one_positions, zero_positions): (Vec<usize>, Vec<usize>) =
        (0..r).partition(|&j| beta >> (r - 1 - j) & 1 == 1);
    let dummies: Vec<usize> = (n..n + zero_positions.len()).collect();
    let dummy_weight = n as f64;

    let mut weights = vec![1.0; n];
    weights.extend(std::iter::repeat_n(dummy_weight, dummies.len()));
    let edges = h
        .edges()
        .iter()
        .map(|e| {
            let mut t = vec![0; r];
            for (&p, &v) in one_positions.iter().zip(e) {
                t[p] = v;
            }
            for (&p, &d) in zero_positions.iter().zip(&dummies) {
                t[p] = d;
            }
            t
        })
        .collect();
    let graph = Hypergraph::new(n + dummies.len(), r, Some(weights), edges, Some(h.edge_weights().to_vec()))?;
    let bias = mu / (r - i_star + 1) as f64;
    let instance = CspInstance::new(graph, psi.clone(), Some(bias))?;
    Ok(DkshToPredicate { instance, bias, one_positions, zero_positions, dummies, dummy_weight, original_n: n })
}

impl DkshToPredicate {
    /// Restrict to the original vertices and pad with the lowest-index zeros up to
    /// `⌊μn⌋` ones.
    pub fn decode(&self, sigma: &Labeling, mu: f64) -> Result<Labeling> {
        if sigma.len() != self.instance.n() {
            return Err(invalid(format!("labeling has {} bits, expected {}", sigma.len(), self.instance.n())));
        }
        let n = self.original_n;
        let target = (mu * n as f64 + WEIGHT_TOL).floor() as usize;
        let mut out = Labeling::new(sigma.bits()[..n].to_vec());
        let have = out.count_ones();
        if have > target {
            return Err(Error::InfeasibleBias(format!("restriction has {have} ones, more than μn = {target}")));
        }
        pad_ascending(&mut out, target);
        Ok(out)
    }
}

/// Turn on the lowest-index zeros until `target` ones are set.
pub(crate) fn pad_ascending(sigma: &mut Labeling, target: usize) {
    let mut have = sigma.count_ones();
    for i in 0..sigma.len() {
        if have >= target {
            break;
        }
        if !sigma.get(i) {
            sigma.set(i, true);
            have += 1;
        }
    }
}

/// Keep the `target` lowest-index ones and clear the rest.
pub(crate) fn trim_ascending(sigma: &mut Labeling, target: usize) {
    let mut kept = 0;
    for i in 0..sigma.len() {
        if sigma.get(i) {
            if kept < target {
                kept += 1;
            } else {
                sigma.set(i, false);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::value_csp;
    use crate::instance::BiasMode;
    use crate::oracle::{brute_force_csp, brute_force_dksh};

    fn k3() -> Hypergraph {
        Hypergraph::uniform(3, 2, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn triangle_into_three_ary_predicate() {
        let psi = Predicate::exactly(2, 3);
        let red = dksh_to_predicate(&k3(), &psi, 0b110, 2.0 / 3.0).unwrap();
        assert_eq!(red.instance.n(), 4);
        assert_eq!(red.dummy_weight, 3.0);
        assert!((red.bias - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(red.instance.graph().edges()[0], vec![0, 1, 3]);

        let a = brute_force_dksh(&k3(), 2.0 / 3.0, BiasMode::AtMost).unwrap();
        let b = brute_force_csp(&red.instance, red.bias, BiasMode::AtMost).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
        let decoded = red.decode(&b.labeling, 2.0 / 3.0).unwrap();
        assert_eq!(decoded.count_ones(), 2);
    }

    #[test]
    fn relabeling_places_dummies_at_zero_coordinates() {
        let psi = Predicate::single(3, 0b101);
        let red = dksh_to_predicate(&k3(), &psi, 0b101, 0.5).unwrap();
        assert_eq!(red.one_positions, vec![0, 2]);
        assert_eq!(red.zero_positions, vec![1]);
        assert_eq!(red.instance.graph().edges()[1], vec![1, 3, 2]);
        let sigma = Labeling::from_bitstring("1100").unwrap();
        assert!((value_csp(&sigma, &red.instance).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_minimal_beta() {
        assert!(matches!(
            dksh_to_predicate(&k3(), &Predicate::and(3), 0b110, 0.5),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            dksh_to_predicate(&k3(), &Predicate::or(3), 0b110, 0.5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn padding_and_trimming_are_ascending() {
        let mut l = Labeling::from_bitstring("00100").unwrap();
        pad_ascending(&mut l, 3);
        assert_eq!(l.to_string(), "11100");
        trim_ascending(&mut l, 1);
        assert_eq!(l.to_string(), "10000");
    }
}
