//! A single-string predicate CSP viewed as a DkSH instance on the 1-coordinates.

use crate::error::{Error, Result};
use crate::instance::{CspInstance, Hypergraph};

/// Keep the coordinates where the unique accepting string has a 1, in edge order, and
/// merge duplicate truncated edges. An all-zero string yields empty edges, which are
/// always satisfied.
pub fn predicate_to_dksh(inst: &CspInstance) -> Result<Hypergraph> {
    let psi = inst.predicate();
    let acc = psi.accepting();
    if acc.len() != 1 {
        return Err(Error::Precondition(format!(
            "predicate must accept exactly one string, accepts {}",
            acc.len()
        )));
    }
    if inst.has_negations() {
        return Err(Error::Precondition("negated coordinates are not supported here".into()));
    }
    let r = psi.arity();
    let beta = acc[0];
    let positions: Vec<usize> = (0..r).filter(|&j| beta >> (r - 1 - j) & 1 == 1).collect();
    let g = inst.graph();
    let edges = g.edges().iter().map(|e| positions.iter().map(|&p| e[p]).collect()).collect();
    let h = Hypergraph::new_allowing_empty(
        g.n(),
        positions.len().max(1),
        Some(g.vertex_weights().to_vec()),
        edges,
        Some(g.edge_weights().to_vec()),
    )?;
    Ok(h.merge_duplicate_edges())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{value_csp, value_dksh, Labeling};
    use crate::predicate::Predicate;

    #[test]
    fn truncates_and_merges() {
        let g = Hypergraph::uniform(4, 3, vec![vec![0, 1, 2], vec![0, 3, 2], vec![1, 2, 3]]).unwrap();
        let inst = CspInstance::new(g, Predicate::single(3, 0b101), None).unwrap();
        let h = predicate_to_dksh(&inst).unwrap();
        assert_eq!(h.edges(), &[vec![0, 2], vec![1, 3]]);
        assert_eq!(h.edge_weights(), &[2.0, 1.0]);
    }

    #[test]
    fn all_zero_string_gives_empty_edges() {
        let g = Hypergraph::uniform(3, 2, vec![vec![0, 1], vec![1, 2]]).unwrap();
        let inst = CspInstance::new(g, Predicate::single(2, 0), None).unwrap();
        let h = predicate_to_dksh(&inst).unwrap();
        assert_eq!(h.edges(), &[Vec::<usize>::new()]);
        assert_eq!(value_dksh(&Labeling::zeros(3), &h).unwrap(), 1.0);
        assert_eq!(value_csp(&Labeling::zeros(3), &inst).unwrap(), 1.0);
    }

    #[test]
    fn rejects_multi_string_predicates() {
        let g = Hypergraph::uniform(2, 2, vec![vec![0, 1]]).unwrap();
        let inst = CspInstance::new(g, Predicate::neq(), None).unwrap();
        assert!(predicate_to_dksh(&inst).is_err());
    }
}
