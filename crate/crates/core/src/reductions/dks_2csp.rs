//! Densest-k-subgraph as a Max-2-CSP over blocks of a random partition.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::instance::{Hypergraph, Labeling, WEIGHT_TOL};

/// Exhaustive 2-CSP search is allowed up to this many labelings.
pub const TWO_CSP_EXHAUSTIVE_CAP: u64 = 1 << 22;

/// A binary constraint between two variables: accepted label pairs with weights.
#[derive(Clone, Debug, Serialize)]
pub struct PairConstraint {
    pub i: usize,
    pub j: usize,
    pub accepted: BTreeMap<(usize, usize), f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Max2Csp {
    pub vars: usize,
    pub labels: usize,
    pub constraints: Vec<PairConstraint>,
}

impl Max2Csp {
    /// Weight of satisfied constraints, unnormalized.
    pub fn satisfied_weight(&self, labels: &[usize]) -> f64 {
        self.constraints
            .iter()
            .filter_map(|c| c.accepted.get(&(labels[c.i], labels[c.j])))
            .sum()
    }
}

/// The constraint system plus the partition used to build it.
#[derive(Clone, Debug, Serialize)]
pub struct DksTo2Csp {
    pub csp: Max2Csp,
    /// `blocks[i][a]` is the vertex that label `a` of variable `i` stands for.
    pub blocks: Vec<Vec<usize>>,
    pub n: usize,
    /// Total edge weight of the source graph; values are reported relative to it.
    pub total_edge_weight: f64,
}

/// Partition the vertices uniformly at random into `μn` blocks of size `1/μ`. Edges
/// between different blocks become accepted label pairs; edges inside a block are lost.
pub fn dks_to_2csp<R: Rng>(g: &Hypergraph, mu: f64, rng: &mut R) -> Result<DksTo2Csp> {
    if g.arity() != 2 || g.edges().iter().any(|e| e.len() != 2) {
        return Err(invalid("graph edges must be pairs"));
    }
    let n = g.n();
    let block = 1.0 / mu;
    let k = mu * n as f64;
    if (block - block.round()).abs() > WEIGHT_TOL || (k - k.round()).abs() > WEIGHT_TOL || k.round() < 1.0 {
        return Err(Error::InfeasibleBias(format!("need integral 1/μ and μn, got 1/μ = {block}, μn = {k}")));
    }
    let (size, vars) = (block.round() as usize, k.round() as usize);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let blocks: Vec<Vec<usize>> = order.chunks(size).map(<[usize]>::to_vec).collect();
    let mut place = vec![(0, 0); n];
    for (i, b) in blocks.iter().enumerate() {
        for (a, &v) in b.iter().enumerate() {
            place[v] = (i, a);
        }
    }
    let mut cons: BTreeMap<(usize, usize), BTreeMap<(usize, usize), f64>> = BTreeMap::new();
    for (e, &w) in g.edges().iter().zip(g.edge_weights()) {
        let (pu, pv) = (place[e[0]], place[e[1]]);
        if pu.0 == pv.0 {
            continue;
        }
        let (lo, hi) = if pu.0 < pv.0 { (pu, pv) } else { (pv, pu) };
        *cons.entry((lo.0, hi.0)).or_default().entry((lo.1, hi.1)).or_insert(0.0) += w;
    }
    let constraints = cons.into_iter().map(|((i, j), accepted)| PairConstraint { i, j, accepted }).collect();
    Ok(DksTo2Csp {
        csp: Max2Csp { vars, labels: size, constraints },
        blocks,
        n,
        total_edge_weight: g.total_edge_weight(),
    })
}

impl DksTo2Csp {
    /// One vertex per block: `S = {π_i⁻¹(σ(i))}`.
    pub fn decode(&self, labels: &[usize]) -> Labeling {
        let support: Vec<usize> = labels.iter().enumerate().map(|(i, &a)| self.blocks[i][a]).collect();
        Labeling::from_support(self.n, &support)
    }

    /// Satisfied constraint weight relative to the source graph's edge weight.
    pub fn value(&self, labels: &[usize]) -> f64 {
        if self.total_edge_weight <= 0.0 {
            return 0.0;
        }
        self.csp.satisfied_weight(labels) / self.total_edge_weight
    }

    /// Best labeling by exhaustive search; the first maximizer in lexicographic order wins.
    pub fn solve_exact(&self) -> Result<(Vec<usize>, f64)> {
        let (vars, labels) = (self.csp.vars, self.csp.labels);
        let count = (labels as u64).checked_pow(vars as u32).filter(|&c| c <= TWO_CSP_EXHAUSTIVE_CAP);
        let Some(count) = count else {
            return Err(Error::CapExceeded {
                what: "2-CSP labelings".into(),
                needed: (labels as f64).powi(vars as i32).min(u64::MAX as f64) as u64,
                cap: TWO_CSP_EXHAUSTIVE_CAP,
            });
        };
        let mut cur = vec![0usize; vars];
        let mut best = (cur.clone(), self.csp.satisfied_weight(&cur));
        for _ in 1..count {
            for d in cur.iter_mut().rev() {
                *d += 1;
                if *d < labels {
                    break;
                }
                *d = 0;
            }
            let v = self.csp.satisfied_weight(&cur);
            if v > best.1 + 1e-12 {
                best = (cur.clone(), v);
            }
        }
        let value = self.value(&best.0);
        Ok((best.0, value))
    }

    /// Coordinate ascent from the all-zero labeling: repeatedly give each variable its
    /// best label (lowest on ties) until nothing improves.
    pub fn solve_local(&self) -> (Vec<usize>, f64) {
        let (vars, labels) = (self.csp.vars, self.csp.labels);
        let mut by_var: Vec<Vec<usize>> = vec![Vec::new(); vars];
        for (c, pc) in self.csp.constraints.iter().enumerate() {
            by_var[pc.i].push(c);
            by_var[pc.j].push(c);
        }
        let mut cur = vec![0usize; vars];
        let local = |cur: &[usize], x: usize, a: usize| -> f64 {
            by_var[x]
                .iter()
                .filter_map(|&c| {
                    let pc = &self.csp.constraints[c];
                    let key = if pc.i == x { (a, cur[pc.j]) } else { (cur[pc.i], a) };
                    pc.accepted.get(&key)
                })
                .sum()
        };
        loop {
            let mut improved = false;
            for x in 0..vars {
                let now = local(&cur, x, cur[x]);
                let (mut best_a, mut best_v) = (cur[x], now);
                for a in 0..labels {
                    let v = local(&cur, x, a);
                    if v > best_v + 1e-12 {
                        best_a = a;
                        best_v = v;
                    }
                }
                if best_a != cur[x] {
                    cur[x] = best_a;
                    improved = true;
                }
            }
            if !improved {
                break;
            }
        }
        let value = self.value(&cur);
        (cur, value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::value_dksh;
    use crate::seed::rng_for;

    fn k4_plus_isolated() -> Hypergraph {
        let mut edges = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                edges.push(vec![a, b]);
            }
        }
        Hypergraph::uniform(8, 2, edges).unwrap()
    }

    #[test]
    fn decode_has_one_vertex_per_block_and_value_is_induced_cross_weight() {
        let g = k4_plus_isolated();
        let red = dks_to_2csp(&g, 0.5, &mut rng_for(1, &[])).unwrap();
        assert_eq!(red.csp.vars, 4);
        assert_eq!(red.csp.labels, 2);
        let (labels, value) = red.solve_exact().unwrap();
        let s = red.decode(&labels);
        assert_eq!(s.count_ones(), 4);
        assert!(value <= value_dksh(&s, &g).unwrap() + 1e-12);
    }

    #[test]
    fn bias_must_divide() {
        let g = k4_plus_isolated();
        assert!(dks_to_2csp(&g, 0.3, &mut rng_for(1, &[])).is_err());
    }

    #[test]
    fn local_search_never_beats_exact() {
        let g = k4_plus_isolated();
        for s in 0..10 {
            let red = dks_to_2csp(&g, 0.25, &mut rng_for(s, &[])).unwrap();
            let (_, exact) = red.solve_exact().unwrap();
            let (_, local) = red.solve_local();
            assert!(local <= exact + 1e-12);
        }
    }
}
