//! Densest-k-subhypergraph: unweighted rounding, bounded-weight cloud solve, and the
//! heavy-vertex enumeration for arbitrary weights.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::instance::{check_bias, Hypergraph, Labeling, WEIGHT_TOL};
use crate::oracle::BRUTE_FORCE_CAP;
use crate::reductions::clique::clique_expansion_mixed;
use crate::reductions::cloud::{cloud_expansion, cloud_sizes, CLOUD_RESOLUTION};
use crate::reductions::dksh_to_pred::{pad_ascending, trim_ascending};
use crate::reductions::heavy::{heavy_set, heavy_vertex_split, restrict};
use crate::seed::{derive_seed, rng_for, TAG_BOUNDED, TAG_UNWEIGHTED, TAG_WEIGHTED};
use crate::solvers::dks::dks_select;
use crate::solvers::{first_argmax, DksBackend, SolveResult, SolverConfig, StageTrace};

/// Output of the unweighted rounding stage.
struct Rounded {
    set: Labeling,
    value: f64,
    /// Mean value of the raw rounded sets, before size adjustment.
    mean_raw_value: f64,
    in_band: usize,
    reps: usize,
}

/// Each vertex copies `dense` with probability `alpha`, otherwise draws Bernoulli(`mu`).
pub fn round_dense_set<R: Rng>(dense: &Labeling, mu: f64, alpha: f64, rng: &mut R) -> Labeling {
    Labeling::new((0..dense.len()).map(|v| if rng.gen_bool(alpha) { dense.get(v) } else { rng.gen_bool(mu) }).collect())
}

/// Solve densest-k-subgraph on the clique expansion, then round: each vertex copies
/// the set indicator with probability `α`, otherwise draws Bernoulli(μ). The best
/// rounded set whose size is within the band is trimmed or padded to exactly `⌊μn⌋`.
fn unweighted_core(h: &Hypergraph, mu: f64, cfg: &SolverConfig) -> Result<Rounded> {
    let n = h.n();
    let k = (mu * n as f64 + WEIGHT_TOL).floor() as usize;
    if k == 0 || k >= n {
        let set = if k == 0 { Labeling::zeros(n) } else { Labeling::ones(n) };
        let value = h.value_of(&set);
        return Ok(Rounded { set, value, mean_raw_value: value, in_band: 1, reps: 0 });
    }
    let g = clique_expansion_mixed(h, mu)?;
    let dense = dks_select(&g, k, cfg.backend, derive_seed(cfg.seed, &[TAG_UNWEIGHTED]))?;
    let r = h.edges().iter().map(Vec::len).max().unwrap_or(1).max(1);
    let alpha = cfg.rounding_alpha.unwrap_or(2.0 / r as f64).clamp(0.0, 1.0);
    let reps = if alpha >= 1.0 { 1 } else { cfg.repetitions_for(mu, r) };
    let (lo, hi) = ((1.0 - cfg.size_band) * k as f64, (1.0 + cfg.size_band) * k as f64);

    let mut best_band: Option<(Labeling, f64)> = None;
    let mut best_any: Option<(Labeling, f64)> = None;
    let mut raw_total = 0.0;
    let mut in_band = 0;
    for j in 0..reps {
        let mut s = round_dense_set(&dense, mu, alpha, &mut rng_for(cfg.seed, &[TAG_UNWEIGHTED, j as u64]));
        raw_total += h.value_of(&s);
        let size = s.count_ones() as f64;
        let band = size >= lo - WEIGHT_TOL && size <= hi + WEIGHT_TOL;
        if s.count_ones() > k {
            trim_ascending(&mut s, k);
        } else {
            pad_ascending(&mut s, k);
        }
        let v = h.value_of(&s);
        let slot = if band {
            in_band += 1;
            &mut best_band
        } else {
            &mut best_any
        };
        if slot.as_ref().is_none_or(|(_, b)| v > b + 1e-12) {
            *slot = Some((s, v));
        }
    }
    let (set, value) = best_band.or(best_any).expect("at least one repetition");
    Ok(Rounded { set, value, mean_raw_value: raw_total / reps as f64, in_band, reps })
}

/// Uniform-weight DkSH: a set of exactly `⌊μn⌋` vertices.
pub fn solve_dksh_unweighted(h: &Hypergraph, mu: f64, cfg: &SolverConfig) -> Result<SolveResult> {
    check_bias(mu)?;
    if !h.is_uniform() {
        return Err(Error::Precondition("vertex weights must be uniform".into()));
    }
    let out = unweighted_core(h, mu, cfg)?;
    let rel = h.weight_of(&out.set);
    let mut res = SolveResult::new(out.set, out.value, rel, mu, mu);
    res.trace.push(
        StageTrace::new("round", out.value, rel)
            .with_note(format!("reps={} in_band={} mean_raw_value={}", out.reps, out.in_band, out.mean_raw_value)),
    );
    Ok(res)
}

/// Cloud sizes for the internal expansion: exact when the exact scale fits the budget,
/// otherwise `max(1, round(w·budget))`.
fn internal_cloud_sizes(weights: &[f64], budget: usize) -> Vec<usize> {
    if let Ok((sizes, _)) = cloud_sizes(weights, CLOUD_RESOLUTION, budget as u64) {
        return sizes;
    }
    let total: f64 = weights.iter().sum();
    weights.iter().map(|&w| ((w / total * budget as f64).round() as usize).max(1)).collect()
}

/// Drop ones from the highest index down until the relative weight is within `bound`.
fn repair_weight(h: &Hypergraph, sigma: &mut Labeling, bound: f64) {
    for v in (0..sigma.len()).rev() {
        if h.weight_of(sigma) <= bound + WEIGHT_TOL {
            break;
        }
        sigma.set(v, false);
    }
}

struct Bounded {
    labeling: Labeling,
    cloud_vertices: usize,
    feasible_reps: usize,
}

/// Cloud-expand, solve the uniform instance at bias `μ`, and decode with a random
/// representative per cloud. Keeps the best decoded labeling of relative weight at
/// most `μ(1+η)`. Zero-weight vertices are labeled 1 up front.
fn bounded_core(h: &Hypergraph, mu: f64, cfg: &SolverConfig) -> Result<Bounded> {
    let n = h.n();
    let bound = mu * (1.0 + cfg.eta);
    if mu >= 1.0 {
        return Ok(Bounded { labeling: Labeling::ones(n), cloud_vertices: 0, feasible_reps: 1 });
    }
    let fixed: Vec<Option<bool>> = h.vertex_weights().iter().map(|&w| (w == 0.0).then_some(true)).collect();
    let restriction = restrict(h, &fixed)?;
    let sub = &restriction.sub;
    let budget = match cfg.backend {
        DksBackend::Exact => cfg.cloud_budget.min(BRUTE_FORCE_CAP),
        _ => cfg.cloud_budget,
    };
    let sizes = internal_cloud_sizes(sub.vertex_weights(), budget.max(sub.n()));
    let cloud = cloud_expansion(sub, &sizes)?;
    let inner = unweighted_core(&cloud.graph, mu, &cfg.with_seed(derive_seed(cfg.seed, &[TAG_BOUNDED])))?;

    let r = sub.edges().iter().map(Vec::len).max().unwrap_or(1).max(1);
    let reps = cfg.repetitions_for(mu, r);
    let mut best: Option<(Labeling, f64)> = None;
    let mut fallback: Option<(Labeling, f64)> = None;
    let mut feasible_reps = 0;
    for j in 0..reps {
        let mut rng = rng_for(cfg.seed, &[TAG_BOUNDED, j as u64]);
        let pi = cloud.decode_random(&inner.set, &mut rng);
        let full = restriction.combine(&fixed, &pi);
        let v = h.value_of(&full);
        let slot = if h.weight_of(&full) <= bound + WEIGHT_TOL {
            feasible_reps += 1;
            &mut best
        } else {
            &mut fallback
        };
        if slot.as_ref().is_none_or(|(_, b)| v > b + 1e-12) {
            *slot = Some((full, v));
        }
    }
    let labeling = match (best, fallback) {
        (Some((l, _)), _) => l,
        (None, Some((mut l, _))) => {
            repair_weight(h, &mut l, bound);
            l
        }
        (None, None) => unreachable!("at least one repetition"),
    };
    Ok(Bounded { labeling, cloud_vertices: cloud.graph.n(), feasible_reps })
}

/// Weighted DkSH when every normalized weight is at most `μ^8`.
pub fn solve_dksh_bounded(h: &Hypergraph, mu: f64, cfg: &SolverConfig) -> Result<SolveResult> {
    check_bias(mu)?;
    cfg.check_eta(mu)?;
    let total = h.total_vertex_weight();
    let cap = mu.powi(8);
    if let Some(v) = (0..h.n()).find(|&v| h.vertex_weights()[v] / total > cap + WEIGHT_TOL * cap) {
        return Err(Error::Precondition(format!(
            "vertex {v} has normalized weight {} above μ^8 = {cap}",
            h.vertex_weights()[v] / total
        )));
    }
    let out = bounded_core(h, mu, cfg)?;
    let (value, rel) = (h.value_of(&out.labeling), h.weight_of(&out.labeling));
    let mut res = SolveResult::new(out.labeling, value, rel, mu, mu * (1.0 + cfg.eta));
    res.trace.push(
        StageTrace::new("cloud-decode", value, rel)
            .with_note(format!("cloud_vertices={} feasible_reps={}", out.cloud_vertices, out.feasible_reps)),
    );
    Ok(res)
}

/// Weighted DkSH with arbitrary weights. Heavy vertices (normalized weight above
/// `μ^heavy_exponent`) are enumerated; for each heavy labeling the light remainder is
/// either filled with ones (when it is lighter than `μη`) or solved by the bounded
/// solver at the remaining budget. The best combination wins; relative weight is
/// always at most `μ(1+η)`.
pub fn solve_dksh_weighted(h: &Hypergraph, mu: f64, cfg: &SolverConfig) -> Result<SolveResult> {
    check_bias(mu)?;
    cfg.check_eta(mu)?;
    let h = h.normalized();
    let n = h.n();
    let heavy = heavy_set(&h, mu, cfg.heavy_exponent);
    if heavy.len() > cfg.heavy_cap {
        return Err(Error::CapExceeded {
            what: "heavy vertices".into(),
            needed: heavy.len() as u64,
            cap: cfg.heavy_cap as u64,
        });
    }
    let t = heavy.len();
    let light_weight: f64 = 1.0 - heavy.iter().map(|&v| h.vertex_weights()[v]).sum::<f64>();
    let fill_light = light_weight < mu * cfg.eta;

    // σ_T in lexicographic order, heavy[0] most significant.
    let labels_of = |m: u64| Labeling::new((0..t).map(|k| m >> (t - 1 - k) & 1 == 1).collect());
    let candidates: Vec<Result<Option<(Labeling, &'static str)>>> = (0..1u64 << t)
        .into_par_iter()
        .map(|m| {
            let st = labels_of(m);
            let st_weight: f64 = (0..t).filter(|&k| st.get(k)).map(|k| h.vertex_weights()[heavy[k]]).sum();
            if st_weight > mu + WEIGHT_TOL {
                return Ok(None);
            }
            let mut full = Labeling::zeros(n);
            for (k, &v) in heavy.iter().enumerate() {
                full.set(v, st.get(k));
            }
            if t == n || light_weight <= 0.0 {
                return Ok(Some((full, "heavy-only")));
            }
            if fill_light {
                (0..n).filter(|v| !heavy.contains(v)).for_each(|v| full.set(v, true));
                return Ok(Some((full, "fill-light")));
            }
            let split = heavy_vertex_split(&h, mu, cfg.eta, &heavy, &st)?;
            let sub = &split.restriction.sub;
            let pi = if split.delta >= 1.0 {
                Labeling::ones(sub.n())
            } else if split.edge_mass <= 0.0 {
                Labeling::zeros(sub.n())
            } else {
                let sub_cfg = cfg.with_seed(derive_seed(cfg.seed, &[TAG_WEIGHTED, m]));
                bounded_core(sub, split.delta / (1.0 + cfg.eta), &sub_cfg)?.labeling
            };
            Ok(Some((split.combine(n, &st, &pi), "bounded")))
        })
        .collect();
    let mut feasible = Vec::new();
    for c in candidates {
        if let Some(x) = c? {
            feasible.push(x);
        }
    }
    let values: Vec<f64> = feasible.iter().map(|(l, _)| h.value_of(l)).collect();
    let best = first_argmax(values.iter().copied()).expect("the all-zero heavy labeling is feasible");
    let (labeling, path) = feasible.swap_remove(best);
    let rel = h.weight_of(&labeling);
    let mut res = SolveResult::new(labeling, values[best], rel, mu, mu * (1.0 + cfg.eta));
    res.trace.push(
        StageTrace::new("heavy-enumeration", values[best], rel)
            .with_note(format!("heavy={t} candidates={} path={path}", values.len())),
    );
    Ok(res)
}
