//! Replacing each hyperedge by a weighted clique on its vertices.

use crate::error::{invalid, Error, Result};
use crate::instance::Hypergraph;

fn pairs(s: usize) -> f64 {
    (s * (s - 1) / 2) as f64
}

/// Every pair of positions in an edge of size `s` becomes a graph edge of weight
/// `μ^(s-2) · w(e) / C(s,2)`. Duplicate pairs are merged.
pub fn clique_expansion(h: &Hypergraph, mu: f64) -> Result<Hypergraph> {
    if h.arity() < 2 {
        return Err(Error::Precondition("clique expansion needs arity at least 2".into()));
    }
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for (k, (e, &w)) in h.edges().iter().zip(h.edge_weights()).enumerate() {
        let s = e.len();
        if s < 2 {
            return Err(invalid(format!("edge {k} has fewer than two vertices")));
        }
        for p in 0..s {
            if e[p + 1..].contains(&e[p]) {
                return Err(invalid(format!("edge {k} repeats vertex {}", e[p])));
            }
        }
        let pw = mu.powi(s as i32 - 2) * w / pairs(s);
        for p in 0..s {
            for q in p + 1..s {
                edges.push(vec![e[p], e[q]]);
                weights.push(pw);
            }
        }
    }
    Ok(Hypergraph::new(h.n(), 2, Some(h.vertex_weights().to_vec()), edges, Some(weights))?.merge_duplicate_edges())
}

/// Clique expansion for edges of mixed size: vertices are deduplicated per edge, a
/// single remaining vertex becomes a loop of weight `w(e)/μ`, and empty edges are
/// dropped since every labeling satisfies them.
pub(crate) fn clique_expansion_mixed(h: &Hypergraph, mu: f64) -> Result<Hypergraph> {
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for (e, &w) in h.edges().iter().zip(h.edge_weights()) {
        let mut u = e.clone();
        u.sort_unstable();
        u.dedup();
        match u.len() {
            0 => {}
            1 => {
                edges.push(vec![u[0], u[0]]);
                weights.push(w / mu);
            }
            s => {
                let pw = mu.powi(s as i32 - 2) * w / pairs(s);
                for p in 0..s {
                    for q in p + 1..s {
                        edges.push(vec![u[p], u[q]]);
                        weights.push(pw);
                    }
                }
            }
        }
    }
    Ok(Hypergraph::new(h.n(), 2, Some(h.vertex_weights().to_vec()), edges, Some(weights))?.merge_duplicate_edges())
}
