use crate::error::{invalid, Result};
use crate::instance::{Hypergraph, Labeling};

/// Pick `k` vertices one at a time, each time the vertex whose addition fully covers
/// the most additional edge weight (lowest index on ties). On singleton edges this is
/// the max-coverage greedy.
pub fn greedy_dksh1(h: &Hypergraph, k: usize) -> Result<Labeling> {
    let n = h.n();
    if k > n {
        return Err(invalid(format!("k = {k} exceeds n = {n}")));
    }
    let mut chosen = vec![false; n];
    // Unchosen vertices remaining in each edge.
    let mut missing: Vec<usize> = h
        .edges()
        .iter()
        .map(|e| {
            let mut u = e.clone();
            u.sort_unstable();
            u.dedup();
            u.len()
        })
        .collect();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (idx, e) in h.edges().iter().enumerate() {
        let mut u = e.clone();
        u.sort_unstable();
        u.dedup();
        for v in u {
            incident[v].push(idx);
        }
    }
    for _ in 0..k {
        let gain = |v: usize| -> f64 {
            incident[v].iter().filter(|&&idx| missing[idx] == 1).map(|&idx| h.edge_weights()[idx]).sum()
        };
        let mut best: Option<(usize, f64)> = None;
        for v in (0..n).filter(|&v| !chosen[v]) {
            let g = gain(v);
            if best.is_none_or(|(_, b)| g > b + 1e-12) {
                best = Some((v, g));
            }
        }
        let (v, _) = best.expect("k <= n leaves a candidate");
        chosen[v] = true;
        for &idx in &incident[v] {
            missing[idx] -= 1;
        }
    }
    Ok(Labeling::new(chosen))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::value_dksh;

    #[test]
    fn singleton_multiset() {
        let h = Hypergraph::uniform(2, 1, vec![vec![0], vec![0], vec![1]]).unwrap();
        let s = greedy_dksh1(&h, 1).unwrap();
        assert_eq!(s.to_string(), "10");
        assert!((value_dksh(&s, &h).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert!(greedy_dksh1(&h, 3).is_err());
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let h = Hypergraph::uniform(3, 1, vec![vec![2], vec![1]]).unwrap();
        assert_eq!(greedy_dksh1(&h, 1).unwrap().to_string(), "010");
    }
}
