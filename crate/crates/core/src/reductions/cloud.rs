//! Replacing weighted vertices by clouds of unit-weight copies.

use rand::Rng;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::instance::{Hypergraph, Labeling};

/// Default rounding resolution and scale cap for cloud sizes.
pub const CLOUD_RESOLUTION: u64 = 1_000_000;
/// Refuse to build expansions with more edges than this.
pub const CLOUD_EDGE_CAP: u64 = 2_000_000;

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Cloud sizes `ℓ(i) = w(i)·N` for the smallest scale `N` that makes them integral once
/// normalized weights are rounded to multiples of `1/resolution`.
pub fn cloud_sizes(weights: &[f64], resolution: u64, cap: u64) -> Result<(Vec<usize>, u64)> {
    let total: f64 = weights.iter().sum();
    let rounded: Vec<u64> = weights.iter().map(|&w| (w / total * resolution as f64).round() as u64).collect();
    if let Some(i) = rounded.iter().position(|&a| a == 0) {
        return Err(invalid(format!("vertex {i} has weight below the cloud resolution 1/{resolution}")));
    }
    let g = rounded.iter().fold(resolution, |g, &a| gcd(g, a));
    let scale = resolution / g;
    if scale > cap {
        return Err(Error::CapExceeded { what: "cloud scale".into(), needed: scale, cap });
    }
    Ok((rounded.iter().map(|&a| (a / g) as usize).collect(), scale))
}

#[derive(Clone, Debug, Serialize)]
pub struct CloudExpansion {
    #[serde(skip)]
    pub graph: Hypergraph,
    pub sizes: Vec<usize>,
    /// Cloud `i` occupies vertices `offsets[i] .. offsets[i] + sizes[i]`.
    pub offsets: Vec<usize>,
}

/// Expand each edge over the product of its vertices' clouds; every copy of edge `e`
/// gets weight `w(e) / ∏ ℓ(i_t)`. The expanded graph has uniform vertex weights.
pub fn cloud_expansion(h: &Hypergraph, sizes: &[usize]) -> Result<CloudExpansion> {
    if sizes.len() != h.n() {
        return Err(invalid(format!("{} cloud sizes for {} vertices", sizes.len(), h.n())));
    }
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return Err(invalid(format!("cloud of vertex {i} is empty")));
    }
    let mut offsets = Vec::with_capacity(sizes.len());
    let mut acc = 0usize;
    for &s in sizes {
        offsets.push(acc);
        acc += s;
    }
    let expanded: u64 = h
        .edges()
        .iter()
        .map(|e| e.iter().map(|&v| sizes[v] as u64).product::<u64>())
        .sum();
    if expanded > CLOUD_EDGE_CAP {
        return Err(Error::CapExceeded { what: "cloud expansion edges".into(), needed: expanded, cap: CLOUD_EDGE_CAP });
    }
    let mut edges = Vec::with_capacity(expanded as usize);
    let mut weights = Vec::with_capacity(expanded as usize);
    for (e, &w) in h.edges().iter().zip(h.edge_weights()) {
        let copies: usize = e.iter().map(|&v| sizes[v]).product();
        let cw = w / copies as f64;
        let mut digits = vec![0usize; e.len()];
        for _ in 0..copies {
            edges.push(e.iter().zip(&digits).map(|(&v, &x)| offsets[v] + x).collect());
            weights.push(cw);
            for (t, d) in digits.iter_mut().enumerate().rev() {
                *d += 1;
                if *d < sizes[e[t]] {
                    break;
                }
                *d = 0;
            }
        }
    }
    let graph = if h.allows_empty_edges() {
        Hypergraph::new_allowing_empty(acc, h.arity(), None, edges, Some(weights))?
    } else {
        Hypergraph::new(acc, h.arity(), None, edges, Some(weights))?
    };
    Ok(CloudExpansion { graph, sizes: sizes.to_vec(), offsets })
}

impl CloudExpansion {
    /// `σ(i) = σ'(i, choice[i])`.
    pub fn decode(&self, sigma: &Labeling, choice: &[usize]) -> Labeling {
        Labeling::new((0..self.sizes.len()).map(|i| sigma.get(self.offsets[i] + choice[i])).collect())
    }

    /// Decode with an independent uniform representative per cloud.
    pub fn decode_random<R: Rng>(&self, sigma: &Labeling, rng: &mut R) -> Labeling {
        let choice: Vec<usize> = self.sizes.iter().map(|&s| rng.gen_range(0..s)).collect();
        self.decode(sigma, &choice)
    }

    /// Probability that vertex `i` decodes to 1.
    pub fn marginals(&self, sigma: &Labeling) -> Vec<f64> {
        (0..self.sizes.len())
            .map(|i| {
                let ones = (0..self.sizes[i]).filter(|&x| sigma.get(self.offsets[i] + x)).count();
                ones as f64 / self.sizes[i] as f64
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::value_dksh;

    #[test]
    fn two_vertex_edge() {
        let h = Hypergraph::new(2, 2, Some(vec![0.4, 0.6]), vec![vec![0, 1]], None).unwrap();
        let (sizes, scale) = cloud_sizes(h.vertex_weights(), CLOUD_RESOLUTION, CLOUD_RESOLUTION).unwrap();
        assert_eq!(sizes, vec![2, 3]);
        assert_eq!(scale, 5);
        let c = cloud_expansion(&h, &sizes).unwrap();
        assert_eq!(c.graph.n(), 5);
        assert_eq!(c.graph.edges().len(), 6);
        assert!(c.graph.edge_weights().iter().all(|&w| (w - 1.0 / 6.0).abs() < 1e-15));
    }

    #[test]
    fn expected_decoded_value_matches_expansion() {
        let h = Hypergraph::new(3, 2, Some(vec![0.25, 0.5, 0.25]), vec![vec![0, 1], vec![1, 2]], Some(vec![1.0, 3.0]))
            .unwrap();
        let (sizes, _) = cloud_sizes(h.vertex_weights(), CLOUD_RESOLUTION, CLOUD_RESOLUTION).unwrap();
        assert_eq!(sizes, vec![1, 2, 1]);
        let c = cloud_expansion(&h, &sizes).unwrap();
        let sp = Labeling::from_bitstring("1101").unwrap();
        let choices = [[0, 0, 0], [0, 1, 0]];
        let mean: f64 = choices
            .iter()
            .map(|ch| value_dksh(&c.decode(&sp, ch), &h).unwrap())
            .sum::<f64>()
            / 2.0;
        assert!((mean - value_dksh(&sp, &c.graph).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn resolution_errors() {
        assert!(cloud_sizes(&[1.0, 1e-9], CLOUD_RESOLUTION, CLOUD_RESOLUTION).is_err());
        assert!(matches!(
            cloud_sizes(&[0.123457, 0.876543], CLOUD_RESOLUTION, 1000),
            Err(Error::CapExceeded { needed: 1_000_000, .. })
        ));
    }
}
