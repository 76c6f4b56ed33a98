//! Fixing the labels of heavy vertices and restricting to the light remainder.

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::instance::{Hypergraph, Labeling, WEIGHT_TOL};

/// Vertices whose normalized weight exceeds `mu^exponent`, ascending.
pub fn heavy_set(h: &Hypergraph, mu: f64, exponent: f64) -> Vec<usize> {
    let total = h.total_vertex_weight();
    let threshold = mu.powf(exponent);
    (0..h.n()).filter(|&i| h.vertex_weights()[i] / total > threshold).collect()
}

/// Sub-instance induced on the free vertices after fixing some labels.
#[derive(Clone, Debug)]
pub struct Restriction {
    /// Free vertices of the original instance; sub-instance vertex `k` is `free[k]`.
    pub free: Vec<usize>,
    /// Edges whose fixed coordinates are all 1, truncated to the free coordinates.
    /// Vertex weights are renormalized over the free set.
    pub sub: Hypergraph,
    /// Weighted fraction of edges whose fixed coordinates are all 1.
    pub edge_mass: f64,
    /// Normalized weight of the free set.
    pub free_weight: f64,
}

/// Fix `fixed[v] = Some(bit)` and keep the rest free. Truncated edges may be empty.
pub fn restrict(h: &Hypergraph, fixed: &[Option<bool>]) -> Result<Restriction> {
    if fixed.len() != h.n() {
        return Err(invalid(format!("{} fixed entries for {} vertices", fixed.len(), h.n())));
    }
    let total = h.total_vertex_weight();
    let free: Vec<usize> = (0..h.n()).filter(|&v| fixed[v].is_none()).collect();
    let free_weight: f64 = free.iter().map(|&v| h.vertex_weights()[v]).sum::<f64>() / total;
    if free.is_empty() || free_weight <= 0.0 {
        return Err(Error::Degenerate("free vertex set has zero weight".into()));
    }
    let mut new_id = vec![usize::MAX; h.n()];
    for (k, &v) in free.iter().enumerate() {
        new_id[v] = k;
    }
    let mut edges = Vec::new();
    let mut weights = Vec::new();
    for (e, &w) in h.edges().iter().zip(h.edge_weights()) {
        if e.iter().all(|&v| fixed[v] != Some(false)) {
            edges.push(e.iter().filter(|&&v| fixed[v].is_none()).map(|&v| new_id[v]).collect::<Vec<_>>());
            weights.push(w);
        }
    }
    let edge_total = h.total_edge_weight();
    let edge_mass = if edge_total > 0.0 { weights.iter().sum::<f64>() / edge_total } else { 0.0 };
    let vw = free.iter().map(|&v| h.vertex_weights()[v] / total / free_weight).collect();
    let sub = Hypergraph::new_allowing_empty(free.len(), h.arity(), Some(vw), edges, Some(weights))?;
    Ok(Restriction { free, sub, edge_mass, free_weight })
}

impl Restriction {
    /// Combine fixed labels with a labeling of the free vertices.
    pub fn combine(&self, fixed: &[Option<bool>], free_labels: &Labeling) -> Labeling {
        let mut out: Vec<bool> = fixed.iter().map(|b| b.unwrap_or(false)).collect();
        for (k, &v) in self.free.iter().enumerate() {
            out[v] = free_labels.get(k);
        }
        Labeling::new(out)
    }
}

/// Heavy/light split for one labeling of the heavy set.
#[derive(Clone, Debug, Serialize)]
pub struct HeavySplit {
    pub heavy: Vec<usize>,
    pub light: Vec<usize>,
    /// Normalized weight of the heavy vertices labeled 1.
    pub heavy_label_weight: f64,
    /// Normalized weight of the light set.
    pub light_weight: f64,
    /// Bias allowed on the light sub-instance: `(μ(1+η) - w(σ_T)) / w(V∖T)`.
    pub delta: f64,
    pub edge_mass: f64,
    #[serde(skip)]
    pub restriction: Restriction,
}

/// Fix the heavy vertices to `sigma_t` (one bit per entry of `heavy`) and restrict.
pub fn heavy_vertex_split(
    h: &Hypergraph,
    mu: f64,
    eta: f64,
    heavy: &[usize],
    sigma_t: &Labeling,
) -> Result<HeavySplit> {
    if sigma_t.len() != heavy.len() {
        return Err(invalid(format!("{} heavy labels for {} heavy vertices", sigma_t.len(), heavy.len())));
    }
    let total = h.total_vertex_weight();
    let mut fixed = vec![None; h.n()];
    let mut heavy_label_weight = 0.0;
    for (k, &v) in heavy.iter().enumerate() {
        if v >= h.n() || fixed[v].is_some() {
            return Err(invalid(format!("heavy vertex {v} invalid or repeated")));
        }
        fixed[v] = Some(sigma_t.get(k));
        if sigma_t.get(k) {
            heavy_label_weight += h.vertex_weights()[v] / total;
        }
    }
    if heavy_label_weight > mu + WEIGHT_TOL {
        return Err(Error::Precondition(format!(
            "heavy labeling weight {heavy_label_weight} exceeds bias {mu}"
        )));
    }
    let restriction = restrict(h, &fixed)?;
    let light_weight = restriction.free_weight;
    Ok(HeavySplit {
        heavy: heavy.to_vec(),
        light: restriction.free.clone(),
        heavy_label_weight,
        light_weight,
        delta: (mu * (1.0 + eta) - heavy_label_weight) / light_weight,
        edge_mass: restriction.edge_mass,
        restriction,
    })
}

impl HeavySplit {
    pub fn combine(&self, n: usize, sigma_t: &Labeling, light_labels: &Labeling) -> Labeling {
        let mut fixed = vec![None; n];
        for (k, &v) in self.heavy.iter().enumerate() {
            fixed[v] = Some(sigma_t.get(k));
        }
        self.restriction.combine(&fixed, light_labels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::value_dksh;

    #[test]
    fn delta_example() {
        // Heavy {0,1} with weights 0.1 and 0.6, light {2,3} with total 0.3.
        let h = Hypergraph::new(4, 2, Some(vec![0.1, 0.6, 0.15, 0.15]), vec![vec![0, 2], vec![1, 3]], None).unwrap();
        let split = heavy_vertex_split(&h, 0.2, 0.1, &[0, 1], &Labeling::from_bitstring("10").unwrap()).unwrap();
        assert!((split.heavy_label_weight - 0.1).abs() < 1e-12);
        assert!((split.light_weight - 0.3).abs() < 1e-12);
        assert!((split.delta - 0.4).abs() < 1e-12);
        assert_eq!(split.restriction.sub.edges(), &[vec![0]]);
        assert!((split.edge_mass - 0.5).abs() < 1e-12);
    }

    #[test]
    fn value_factorizes() {
        let h = Hypergraph::new(
            5,
            3,
            Some(vec![0.3, 0.28, 0.14, 0.14, 0.14]),
            vec![vec![0, 2, 3], vec![1, 3, 4], vec![0, 1, 2], vec![2, 3, 4]],
            Some(vec![1.0, 2.0, 0.5, 1.5]),
        )
        .unwrap();
        let heavy = heavy_set(&h, 0.5, 1.0);
        assert!(heavy.is_empty());
        let heavy = heavy_set(&h, 0.5, 2.0);
        assert_eq!(heavy, vec![0, 1]);
        let st = Labeling::from_bitstring("10").unwrap();
        let split = heavy_vertex_split(&h, 0.5, 0.2, &heavy, &st).unwrap();
        for mask in 0..8u64 {
            let pi = Labeling::from_mask(3, mask);
            let full = split.combine(5, &st, &pi);
            let lhs = value_dksh(&full, &h).unwrap();
            let rhs = split.edge_mass * value_dksh(&pi, &split.restriction.sub).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn degenerate_light_set() {
        let h = Hypergraph::uniform(2, 2, vec![vec![0, 1]]).unwrap();
        let r = heavy_vertex_split(&h, 0.5, 0.1, &[0, 1], &Labeling::from_bitstring("10").unwrap());
        assert!(matches!(r, Err(Error::Degenerate(_))));
    }
}
