//! Densest-k-subgraph backends. Graphs are arity-2 hypergraphs; a loop `(v, v)` counts
//! as induced whenever `v` is chosen.

use crate::error::{invalid, Error, Result};
use crate::instance::{check_bias, relative_weight, value_dksh, BiasMode, Hypergraph, Labeling, WEIGHT_TOL};
use crate::oracle::brute_force_dksh;
use crate::reductions::dks_2csp::{dks_to_2csp, TWO_CSP_EXHAUSTIVE_CAP};
use crate::seed::{rng_for, TAG_DKS};
use crate::solvers::{DksBackend, SolveResult, SolverConfig, StageTrace};

fn check_graph(g: &Hypergraph) -> Result<()> {
    if g.edges().iter().any(|e| e.len() != 2) {
        return Err(invalid("densest-subgraph input must have edges of exactly two vertices"));
    }
    Ok(())
}

/// A set of exactly `μn` vertices (rounded down for the greedy backend; the exact and
/// 2-CSP backends need `μn` integral).
pub fn solve_dks(g: &Hypergraph, mu: f64, cfg: &SolverConfig) -> Result<SolveResult> {
    check_bias(mu)?;
    check_graph(g)?;
    let kf = mu * g.n() as f64;
    if cfg.backend != DksBackend::GreedyPeel && (kf - kf.round()).abs() > WEIGHT_TOL {
        return Err(Error::InfeasibleBias(format!("μn = {kf} is not an integer")));
    }
    let k = (kf + WEIGHT_TOL).floor() as usize;
    let s = dks_select(g, k, cfg.backend, cfg.seed)?;
    let value = value_dksh(&s, g)?;
    let rel = relative_weight(&s, g)?;
    let mut out = SolveResult::new(s, value, rel, mu, mu);
    out.trace.push(StageTrace::new("dks", value, rel).with_note(format!("{:?}", cfg.backend)));
    Ok(out)
}

pub(crate) fn dks_select(g: &Hypergraph, k: usize, backend: DksBackend, seed: u64) -> Result<Labeling> {
    let n = g.n();
    if k >= n {
        return Ok(Labeling::ones(n));
    }
    if k == 0 {
        return Ok(Labeling::zeros(n));
    }
    match backend {
        DksBackend::GreedyPeel => Ok(greedy_peel(g, k)),
        DksBackend::Exact => {
            let uniform = Hypergraph::new(n, 2, None, g.edges().to_vec(), Some(g.edge_weights().to_vec()))?;
            Ok(brute_force_dksh(&uniform, k as f64 / n as f64, BiasMode::Exactly)?.labeling)
        }
        DksBackend::Via2Csp => {
            let mu = k as f64 / n as f64;
            let red = dks_to_2csp(g, mu, &mut rng_for(seed, &[TAG_DKS]))?;
            let small = (red.csp.labels as f64).powi(red.csp.vars as i32) <= TWO_CSP_EXHAUSTIVE_CAP as f64;
            let (labels, _) = if small { red.solve_exact()? } else { red.solve_local() };
            Ok(red.decode(&labels))
        }
    }
}

/// Peel vertices of least weighted induced degree (largest index first on ties) until
/// `k` remain.
fn greedy_peel(g: &Hypergraph, k: usize) -> Labeling {
    let n = g.n();
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut degree = vec![0.0; n];
    for (idx, e) in g.edges().iter().enumerate() {
        let w = g.edge_weights()[idx];
        incident[e[0]].push(idx);
        degree[e[0]] += w;
        if e[1] != e[0] {
            incident[e[1]].push(idx);
            degree[e[1]] += w;
        }
    }
    let mut alive = vec![true; n];
    for _ in 0..n - k {
        let mut pick = None;
        for v in (0..n).rev() {
            if alive[v] && pick.is_none_or(|p: usize| degree[v] < degree[p] - 1e-12) {
                pick = Some(v);
            }
        }
        let v = pick.expect("some vertex alive");
        alive[v] = false;
        for &idx in &incident[v] {
            let e = &g.edges()[idx];
            let other = if e[0] == v { e[1] } else { e[0] };
            if other != v && alive[other] {
                degree[other] -= g.edge_weights()[idx];
            }
        }
    }
    Labeling::new(alive)
}

#[cfg(test)]
mod tests {
    use super::*;

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
    fn backends_find_the_clique() {
        let g = k4_plus_isolated();
        for backend in [DksBackend::Exact, DksBackend::GreedyPeel] {
            let cfg = SolverConfig { backend, ..Default::default() };
            let r = solve_dks(&g, 0.5, &cfg).unwrap();
            assert_eq!(r.labeling.to_string(), "11110000");
            assert!((r.value - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_on_k4_half() {
        let mut edges = Vec::new();
        for a in 0..4 {
            for b in a + 1..4 {
                edges.push(vec![a, b]);
            }
        }
        let g = Hypergraph::uniform(4, 2, edges).unwrap();
        let cfg = SolverConfig { backend: DksBackend::Exact, ..Default::default() };
        let r = solve_dks(&g, 0.5, &cfg).unwrap();
        assert!((r.value - 1.0 / 6.0).abs() < 1e-12);
    }

    #[test]
    fn via_2csp_returns_k_vertices() {
        let g = k4_plus_isolated();
        let cfg = SolverConfig { backend: DksBackend::Via2Csp, seed: 3, ..Default::default() };
        let r = solve_dks(&g, 0.5, &cfg).unwrap();
        assert_eq!(r.labeling.count_ones(), 4);
        assert!(solve_dks(&g, 0.3, &cfg).is_err());
    }

    #[test]
    fn loops_count_for_their_vertex() {
        let g = Hypergraph::new(3, 2, None, vec![vec![2, 2], vec![0, 1]], Some(vec![2.0, 1.0])).unwrap();
        let r = solve_dks(&g, 1.0 / 3.0, &SolverConfig::default()).unwrap();
        assert_eq!(r.labeling.to_string(), "001");
    }
}
