//! Exhaustive optimum over all labelings, used as ground truth for small instances.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{check_bias, is_feasible, BiasMode, CspInstance, Hypergraph, Labeling, WEIGHT_TOL};

/// Largest vertex count the exhaustive search accepts.
pub const BRUTE_FORCE_CAP: usize = 22;

/// Values within this distance of the optimum count as ties.
const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub labeling: Labeling,
    pub value: f64,
    pub relative_weight: f64,
}

/// Something with vertex weights and a value for every labeling mask.
pub trait Objective: Sync {
    fn n(&self) -> usize;
    fn vertex_weights(&self) -> &[f64];
    /// Bit `i` of `mask` is vertex `i`.
    fn value_of_mask(&self, mask: u64) -> f64;
}

struct DkshObjective<'a> {
    h: &'a Hypergraph,
    edges: Vec<(u64, f64)>,
    total: f64,
}

impl<'a> DkshObjective<'a> {
    fn new(h: &'a Hypergraph) -> Self {
        let edges = h
            .edges()
            .iter()
            .zip(h.edge_weights())
            .map(|(e, &w)| (e.iter().fold(0u64, |m, &v| m | 1 << v), w))
            .collect();
        DkshObjective { h, edges, total: h.total_edge_weight() }
    }
}

impl Objective for DkshObjective<'_> {
    fn n(&self) -> usize {
        self.h.n()
    }
    fn vertex_weights(&self) -> &[f64] {
        self.h.vertex_weights()
    }
    fn value_of_mask(&self, mask: u64) -> f64 {
        if self.total <= 0.0 {
            return 0.0;
        }
        self.edges.iter().filter(|(e, _)| e & mask == *e).map(|(_, w)| w).sum::<f64>() / self.total
    }
}

struct CspObjective<'a> {
    inst: &'a CspInstance,
    total: f64,
}

impl Objective for CspObjective<'_> {
    fn n(&self) -> usize {
        self.inst.n()
    }
    fn vertex_weights(&self) -> &[f64] {
        self.inst.graph().vertex_weights()
    }
    fn value_of_mask(&self, mask: u64) -> f64 {
        if self.total <= 0.0 {
            return 0.0;
        }
        let g = self.inst.graph();
        let flips = self.inst.flip_masks();
        let psi = self.inst.predicate();
        let sat: f64 = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(k, e)| {
                let idx = e.iter().fold(0usize, |acc, &v| acc << 1 | (mask >> v & 1) as usize);
                psi.accepts(idx ^ flips.map_or(0, |f| f[*k] as usize))
            })
            .map(|(k, _)| g.edge_weights()[k])
            .sum();
        sat / self.total
    }
}

/// Exact optimum of a DkSH instance under the bias constraint.
pub fn brute_force_dksh(h: &Hypergraph, mu: f64, mode: BiasMode) -> Result<Optimum> {
    brute_force(&DkshObjective::new(h), mu, mode)
}

/// Exact optimum of a CSP instance under the bias constraint.
pub fn brute_force_csp(inst: &CspInstance, mu: f64, mode: BiasMode) -> Result<Optimum> {
    brute_force(&CspObjective { inst, total: inst.graph().total_edge_weight() }, mu, mode)
}

/// Enumerate every labeling. Among optimal feasible labelings the lexicographically
/// smallest bit string (vertex 0 first) wins. The search is split across threads but
/// the answer does not depend on how.
pub fn brute_force<O: Objective>(obj: &O, mu: f64, mode: BiasMode) -> Result<Optimum> {
    check_bias(mu)?;
    let n = obj.n();
    if n > BRUTE_FORCE_CAP {
        return Err(Error::CapExceeded {
            what: "exhaustive search vertices".into(),
            needed: n as u64,
            cap: BRUTE_FORCE_CAP as u64,
        });
    }
    let weights = obj.vertex_weights();
    let total: f64 = weights.iter().sum();
    if mode == BiasMode::Exactly && weights.iter().all(|&w| w == weights[0]) {
        let k = mu * n as f64;
        if (k - k.round()).abs() > WEIGHT_TOL {
            return Err(Error::InfeasibleBias(format!("μn = {k} is not an integer")));
        }
    }

    // Enumeration index m has vertex 0 as its most significant bit, so increasing m
    // is lexicographic order on bit strings.
    let to_mask = |m: u64| if n == 0 { 0 } else { m.reverse_bits() >> (64 - n) };
    let rel = |mask: u64| {
        let mut s = 0.0;
        let mut m = mask;
        while m != 0 {
            s += weights[m.trailing_zeros() as usize];
            m &= m - 1;
        }
        s / total
    };
    let count = 1u64 << n;
    let best = (0..count)
        .into_par_iter()
        .filter_map(|m| {
            let mask = to_mask(m);
            is_feasible(rel(mask), mu, mode).then(|| obj.value_of_mask(mask))
        })
        .reduce_with(f64::max)
        .ok_or_else(|| Error::InfeasibleBias(format!("no labeling has relative weight {mode:?} {mu}")))?;
    let first = (0..count)
        .into_par_iter()
        .filter(|&m| {
            let mask = to_mask(m);
            is_feasible(rel(mask), mu, mode) && obj.value_of_mask(mask) >= best - TIE_TOL
        })
        .min()
        .expect("maximizer exists");
    let mask = to_mask(first);
    Ok(Optimum { labeling: Labeling::from_mask(n, mask), value: obj.value_of_mask(mask), relative_weight: rel(mask) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::value_dksh;
    use crate::predicate::Predicate;

    fn k3() -> Hypergraph {
        Hypergraph::uniform(3, 2, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap()
    }

    #[test]
    fn triangle_exact_two_thirds() {
        let opt = brute_force_dksh(&k3(), 2.0 / 3.0, BiasMode::Exactly).unwrap();
        assert!((opt.value - 1.0 / 3.0).abs() < 1e-12);
        // Lexicographically smallest optimal string.
        assert_eq!(opt.labeling.to_string(), "011");
    }

    #[test]
    fn path_at_most() {
        let path = Hypergraph::uniform(3, 2, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let opt = brute_force_dksh(&path, 2.0 / 3.0, BiasMode::AtMost).unwrap();
        assert!((opt.value - 0.5).abs() < 1e-12);
        let all = brute_force_dksh(&path, 1.0, BiasMode::AtMost).unwrap();
        assert_eq!(all.value, value_dksh(&Labeling::ones(3), &path).unwrap());
    }

    #[test]
    fn exactly_mode_rejects_fractional_target() {
        assert!(matches!(brute_force_dksh(&k3(), 0.5, BiasMode::Exactly), Err(Error::InfeasibleBias(_))));
    }

    #[test]
    fn cap_is_enforced() {
        let h = Hypergraph::uniform(23, 1, vec![vec![0]]).unwrap();
        assert!(matches!(brute_force_dksh(&h, 0.5, BiasMode::AtMost), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn csp_optimum_neq() {
        let g = Hypergraph::uniform(3, 2, vec![vec![0, 1], vec![1, 2], vec![0, 2]]).unwrap();
        let inst = CspInstance::new(g, Predicate::neq(), None).unwrap();
        let opt = brute_force_csp(&inst, 1.0 / 3.0, BiasMode::AtMost).unwrap();
        assert!((opt.value - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(opt.labeling.to_string(), "001");
    }

    #[test]
    fn answer_is_independent_of_thread_count() {
        let edges: Vec<Vec<usize>> = (0..14).map(|i| vec![i, (i * 5 + 3) % 14]).collect();
        let h = Hypergraph::uniform(14, 2, edges).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| brute_force_dksh(&h, 0.5, BiasMode::AtMost).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
