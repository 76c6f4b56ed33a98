//! Named self-checks: each suite runs an algorithm or reduction on seeded random
//! small instances and compares it with exhaustive search or a closed form.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample;
use rand::Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{invalid, Result};
use crate::gadget::hypercube::hypercube_acceptance;
use crate::gadget::sse::{sse_acceptance, RegularGraph};
use crate::gadget::ug::{ug_acceptance, UgInstance};
use crate::gadget::{gamma2, gaussian_stability, Assignment, GadgetParams, HypercubeVariant};
use crate::instance::{value_csp, value_dksh, BiasMode, CspInstance, Hypergraph, Labeling};
use crate::oracle::{brute_force_csp, brute_force_dksh};
use crate::predicate::Predicate;
use crate::reductions::cloud::cloud_expansion;
use crate::reductions::{clique_expansion, dks_to_2csp, dksh_to_predicate, predicate_to_dksh};
use crate::seed::{rng_for, Rng as SeededRng};
use crate::solvers::{greedy_dksh1, round_dense_set, solve_dksh_weighted, solve_general, subsample_half, SolverConfig};

pub const CLAIMS: &[&str] = &[
    "minimal-set",
    "cl-red",
    "cl-alg-1b",
    "cl-hp-val",
    "clique",
    "greedy-dksh1",
    "dks-2csp",
    "weighted",
    "gadget-completeness",
    "gamma",
    "determinism",
];

/// Size knobs for the suites. `scale` multiplies case and sample counts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyConfig {
    pub n_max: usize,
    pub seed: u64,
    pub scale: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig { n_max: 8, seed: 0, scale: 1.0 }
    }
}

impl VerifyConfig {
    fn count(&self, base: usize) -> usize {
        ((base as f64 * self.scale).round() as usize).max(1)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub claim: String,
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    pub metrics: BTreeMap<String, f64>,
}

impl SuiteReport {
    fn new(claim: &str) -> Self {
        SuiteReport { claim: claim.into(), cases: 0, passed: 0, failed: 0, failures: Vec::new(), metrics: BTreeMap::new() }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
            if self.failures.len() < 10 {
                self.failures.push(what());
            }
        }
    }

    fn metric(&mut self, key: &str, v: f64) {
        self.metrics.insert(key.into(), v);
    }

    pub fn ok(&self) -> bool {
        self.failed == 0
    }
}

pub fn run_claim(name: &str, cfg: &VerifyConfig) -> Result<SuiteReport> {
    let idx = CLAIMS.iter().position(|&c| c == name).ok_or_else(|| invalid(format!("unknown claim {name}")))?;
    let rng = rng_for(cfg.seed, &[0x7665_7269, idx as u64]);
    match name {
        "minimal-set" => Ok(minimal_set()),
        "cl-red" => cl_red(cfg, rng),
        "cl-alg-1b" => Ok(subsampling_law(cfg, rng)),
        "cl-hp-val" => cloud_values(cfg, rng),
        "clique" => clique(cfg, rng),
        "greedy-dksh1" => greedy(cfg, rng),
        "dks-2csp" => dks_2csp(cfg, rng),
        "weighted" => weighted(cfg, rng),
        "gadget-completeness" => gadget_completeness(cfg),
        "gamma" => gamma(),
        "determinism" => determinism(cfg),
        _ => unreachable!("listed in CLAIMS"),
    }
}

fn distinct_edges(rng: &mut SeededRng, n: usize, size: usize, m: usize) -> Vec<Vec<usize>> {
    (0..m).map(|_| sample(rng, n, size).into_vec()).collect()
}

fn minimal_set() -> SuiteReport {
    let mut rep = SuiteReport::new("minimal-set");
    for r in 1..=3usize {
        for t in 0u64..1 << (1 << r) {
            let table: Vec<bool> = (0..1 << r).map(|x| t >> x & 1 == 1).collect();
            let p = Predicate::from_table(r, table).expect("valid table");
            let acc = p.accepting();
            let oracle: Vec<usize> =
                acc.iter().copied().filter(|&x| !acc.iter().any(|&y| y != x && y & x == y)).collect();
            let prof = p.classify();
            let ok = p.minimal_elements() == oracle
                && prof.bias_independent == oracle.iter().all(|x| x.count_ones() <= 1)
                && prof.exponent == oracle.iter().map(|x| x.count_ones()).min();
            rep.check(ok, || format!("r={r} table={t:b}"));
        }
    }
    rep
}

fn cl_red(cfg: &VerifyConfig, mut rng: SeededRng) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("cl-red");
    let n_max = cfg.n_max.clamp(2, 12);
    for case in 0..cfg.count(100) {
        let r = rng.gen_range(1..=3usize);
        let psi = loop {
            let p = Predicate::from_table(r, (0..1 << r).map(|_| rng.gen_bool(0.4)).collect())?;
            if p.minimal_elements().iter().any(|&b| b != 0) {
                break p;
            }
        };
        let cands: Vec<usize> = psi.minimal_elements().into_iter().filter(|&b| b != 0).collect();
        let beta = cands[rng.gen_range(0..cands.len())];
        let i_star = beta.count_ones() as usize;
        let n = rng.gen_range(i_star.max(2)..=n_max);
        let m = rng.gen_range(1..=2 * n);
        let h = Hypergraph::uniform(n, i_star, distinct_edges(&mut rng, n, i_star, m))?;
        let k = rng.gen_range(1..n);
        let mu = k as f64 / n as f64;
        let red = dksh_to_predicate(&h, &psi, beta, mu)?;
        let csp_opt = brute_force_csp(&red.instance, red.bias, BiasMode::AtMost)?;
        let h_opt = brute_force_dksh(&h, mu, BiasMode::AtMost)?;
        let back = red.decode(&csp_opt.labeling, mu)?;
        let ok = (csp_opt.value - h_opt.value).abs() <= 1e-9
            && value_dksh(&back, &h)? >= csp_opt.value - 1e-9
            && back.count_ones() <= k;
        rep.check(ok, || format!("case {case}: reduction opt {} vs {}", csp_opt.value, h_opt.value));

        // Truncation direction on a single-string predicate.
        let beta = rng.gen_range(0..1usize << r);
        let edges: Vec<Vec<usize>> = (0..m).map(|_| (0..r).map(|_| rng.gen_range(0..n)).collect()).collect();
        let inst = CspInstance::new(Hypergraph::uniform(n, r, edges)?, Predicate::single(r, beta), None)?;
        let trunc = predicate_to_dksh(&inst)?;
        let psi_opt = brute_force_csp(&inst, mu, BiasMode::AtMost)?;
        let trunc_opt = brute_force_dksh(&trunc, mu, BiasMode::AtMost)?;
        let ok = trunc_opt.value >= psi_opt.value - 1e-9 && value_dksh(&psi_opt.labeling, &trunc)? >= psi_opt.value - 1e-9;
        rep.check(ok, || format!("case {case}: truncation {} < {}", trunc_opt.value, psi_opt.value));
    }
    Ok(rep)
}

/// Probability that thinning a labeling keeps a single-string edge satisfied.
fn subsampling_law(cfg: &VerifyConfig, mut rng: SeededRng) -> SuiteReport {
    let mut rep = SuiteReport::new("cl-alg-1b");
    let trials = cfg.count(20_000);
    let mut worst: f64 = 0.0;
    for case in 0..cfg.count(20) {
        let r = rng.gen_range(1..=3usize);
        let beta = rng.gen_range(0..1usize << r);
        let n = r + 2;
        let e = sample(&mut rng, n, r).into_vec();
        let mut sigma = Labeling::from_support(n, &[]);
        let mut extra = 0;
        for (j, &v) in e.iter().enumerate() {
            let one = beta >> (r - 1 - j) & 1 == 1;
            let bit = one || rng.gen_bool(0.5);
            extra += usize::from(!one && bit);
            sigma.set(v, bit);
        }
        let i_star = beta.count_ones() as i32;
        let p = 2f64.powi(-(i_star + extra as i32));
        let inst = CspInstance::new(Hypergraph::uniform(n, r, vec![e.clone()]).expect("valid"), Predicate::single(r, beta), None)
            .expect("valid");
        let hits = (0..trials).filter(|_| value_csp(&subsample_half(&sigma, &mut rng), &inst).unwrap_or(0.0) == 1.0).count();
        let freq = hits as f64 / trials as f64;
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        let z = if sd == 0.0 { if freq == p { 0.0 } else { f64::INFINITY } } else { (freq - p).abs() / sd };
        worst = worst.max(z);
        rep.check(z <= 3.0 && p >= 2f64.powi(-(r as i32)), || format!("case {case}: freq {freq} vs {p} ({z:.2} sd)"));
    }
    rep.metric("max_sd", worst);
    rep
}

fn cloud_values(cfg: &VerifyConfig, mut rng: SeededRng) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("cl-hp-val");
    let n_max = cfg.n_max.clamp(2, 6);
    for case in 0..cfg.count(40) {
        let n = rng.gen_range(2..=n_max);
        let r = rng.gen_range(1..=n.min(3));
        let sizes: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=3)).collect();
        let w: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
        let m = rng.gen_range(1..=2 * n);
        let h = Hypergraph::new(n, r, Some(w), distinct_edges(&mut rng, n, r, m), None)?;
        let cloud = cloud_expansion(&h, &sizes)?;
        let big = cloud.graph.n();
        let k = rng.gen_range(1..big);
        let mu = k as f64 / big as f64;
        let h_opt = brute_force_dksh(&h, mu, BiasMode::AtMost)?;
        let c_opt = brute_force_dksh(&cloud.graph, mu, BiasMode::Exactly)?;
        rep.check(c_opt.value >= h_opt.value - 1e-9, || format!("case {case}: cloud {} < {}", c_opt.value, h_opt.value));

        // Random decoding of a random cloud labeling is unbiased for the value.
        let sp = Labeling::new((0..big).map(|_| rng.gen_bool(0.5)).collect());
        let target = value_dksh(&sp, &cloud.graph)?;
        let t = cfg.count(4000);
        let vals: Vec<f64> = (0..t).map(|_| value_dksh(&cloud.decode_random(&sp, &mut rng), &h).unwrap_or(0.0)).collect();
        let mean = vals.iter().sum::<f64>() / t as f64;
        let sd = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (t.max(2) - 1) as f64 / t as f64).sqrt();
        // A constant sample leaves only rounding noise in `sd`.
        let ok = (mean - target).abs() <= (3.0 * sd).max(1e-9);
        rep.check(ok, || format!("case {case}: decoded mean {mean} vs {target}"));
    }

    // Projecting a weighted random edge of the expansion gives a weighted random edge.
    let n = 5;
    let sizes = vec![1, 2, 3, 2, 1];
    let w: Vec<f64> = sizes.iter().map(|&s| s as f64).collect();
    let edges = distinct_edges(&mut rng, n, 3, 6);
    let ew: Vec<f64> = (0..6).map(|_| rng.gen_range(1..=4) as f64).collect();
    let h = Hypergraph::new(n, 3, Some(w), edges, Some(ew))?;
    let cloud = cloud_expansion(&h, &sizes)?;
    let p_value = projection_chi_square(&h, &cloud, cfg.count(100_000), &mut rng);
    rep.metric("projection_p_value", p_value);
    rep.check(p_value > 0.01, || format!("projection chi-square p = {p_value}"));
    Ok(rep)
}

/// Chi-square p-value for "projected expansion edges are distributed like `h`'s edges".
pub fn projection_chi_square(
    h: &Hypergraph,
    cloud: &crate::reductions::cloud::CloudExpansion,
    samples: usize,
    rng: &mut SeededRng,
) -> f64 {
    let owner: Vec<usize> = (0..cloud.sizes.len()).flat_map(|i| std::iter::repeat_n(i, cloud.sizes[i])).collect();
    let mut expected: BTreeMap<Vec<usize>, f64> = BTreeMap::new();
    for (e, &w) in h.edges().iter().zip(h.edge_weights()) {
        *expected.entry(e.clone()).or_default() += w / h.total_edge_weight();
    }
    let pick = WeightedIndex::new(cloud.graph.edge_weights()).expect("positive weights");
    let mut counts: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for _ in 0..samples {
        let e: Vec<usize> = cloud.graph.edges()[pick.sample(rng)].iter().map(|&v| owner[v]).collect();
        *counts.entry(e).or_default() += 1;
    }
    if counts.keys().any(|k| !expected.contains_key(k)) {
        return 0.0;
    }
    let stat: f64 = expected
        .iter()
        .map(|(k, &p)| {
            let exp = p * samples as f64;
            let obs = *counts.get(k).unwrap_or(&0) as f64;
            (obs - exp).powi(2) / exp
        })
        .sum();
    let df = (expected.len() - 1).max(1) as f64;
    1.0 - ChiSquared::new(df).expect("positive df").cdf(stat)
}

fn clique(cfg: &VerifyConfig, mut rng: SeededRng) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("clique");
    let n_max = cfg.n_max.clamp(3, 12);
    for case in 0..cfg.count(60) {
        let n = rng.gen_range(3..=n_max);
        let m = rng.gen_range(1..=2 * n);
        let ew: Vec<f64> = (0..m).map(|_| rng.gen_range(0.5..2.0)).collect();
        let h = Hypergraph::new(n, 3, None, distinct_edges(&mut rng, n, 3, m), Some(ew))?;
        let mu = rng.gen_range(1..n) as f64 / n as f64;
        let s = brute_force_dksh(&h, mu, BiasMode::Exactly)?.labeling;
        let g = clique_expansion(&h, mu)?;
        let (lhs, rhs) = (g.satisfied_weight(&s)?, mu * h.satisfied_weight(&s)?);
        rep.check(lhs >= rhs - 1e-12, || format!("case {case}: {lhs} < {rhs}"));
    }
    let (n, mu, alpha) = (60usize, 0.2, 2.0 / 3.0);
    let k = (mu * n as f64) as usize;
    let dense = Labeling::from_support(n, &(0..k).collect::<Vec<_>>());
    let trials = cfg.count(10_000);
    let big = (0..trials).filter(|_| round_dense_set(&dense, mu, alpha, &mut rng).count_ones() as f64 >= 1.2 * k as f64).count();
    let freq = big as f64 / trials as f64;
    let bound = (-2.0 * (0.2 * k as f64).powi(2) / n as f64).exp();
    rep.metric("oversize_frequency", freq);
    rep.metric("hoeffding_bound", bound);
    rep.check(freq <= bound, || format!("oversize frequency {freq} above {bound}"));
    Ok(rep)
}

fn greedy(cfg: &VerifyConfig, mut rng: SeededRng) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("greedy-dksh1");
    let n_max = cfg.n_max.clamp(1, 16);
    let factor = 1.0 - (-1f64).exp();
    for case in 0..cfg.count(200) {
        let n = rng.gen_range(1..=n_max);
        let m = rng.gen_range(1..=2 * n + 2);
        let edges = (0..m).map(|_| vec![rng.gen_range(0..n)]).collect();
        let ew = (0..m).map(|_| rng.gen_range(0.1..3.0)).collect();
        let h = Hypergraph::new(n, 1, None, edges, Some(ew))?;
        let k = rng.gen_range(1..=n);
        let s = greedy_dksh1(&h, k)?;
        let val = value_dksh(&s, &h)?;
        let opt = brute_force_dksh(&h, k as f64 / n as f64, BiasMode::AtMost)?.value;
        rep.check(val >= factor * opt - 1e-12 && s.count_ones() == k, || format!("case {case}: {val} vs opt {opt}"));
    }
    Ok(rep)
}

fn dks_2csp(cfg: &VerifyConfig, mut rng: SeededRng) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("dks-2csp");
    let mut ratios = Vec::new();
    for case in 0..cfg.count(10) {
        let block = rng.gen_range(2..=3usize);
        let blocks = rng.gen_range(2..=(cfg.n_max.clamp(4, 12) / block).max(2));
        let n = block * blocks;
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.5) {
                    edges.push(vec![u, v]);
                }
            }
        }
        if edges.is_empty() {
            edges.push(vec![0, 1]);
        }
        let g = Hypergraph::uniform(n, 2, edges)?;
        let mu = 1.0 / block as f64;
        let delta = brute_force_dksh(&g, mu, BiasMode::Exactly)?.value;
        let parts = cfg.count(50);
        let mut opts = Vec::with_capacity(parts);
        for _ in 0..parts {
            let red = dks_to_2csp(&g, mu, &mut rng)?;
            let (labels, opt) = red.solve_exact()?;
            let decoded = value_dksh(&red.decode(&labels), &g)?;
            rep.check(opt <= delta + 1e-9 && decoded >= opt - 1e-9, || format!("case {case}: 2-CSP {opt} vs {delta}"));
            opts.push(opt);
        }
        let mean = opts.iter().sum::<f64>() / parts as f64;
        let sd = (opts.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (parts.max(2) - 1) as f64 / parts as f64).sqrt();
        ratios.push(mean / delta);
        rep.check(mean + 3.0 * sd >= 0.5 * delta, || format!("case {case}: mean 2-CSP value {mean} below half of {delta}"));
    }
    rep.metric("min_mean_ratio", ratios.iter().copied().fold(f64::INFINITY, f64::min));
    Ok(rep)
}

fn weighted(cfg: &VerifyConfig, mut rng: SeededRng) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("weighted");
    let n_max = cfg.n_max.clamp(3, 14);
    let cases = cfg.count(60);
    let mut floor_hits = 0;
    for case in 0..cases {
        let n = rng.gen_range(3..=n_max);
        let r = rng.gen_range(1..=3usize);
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let m = rng.gen_range(1..=2 * n);
        let ew: Vec<f64> = (0..m).map(|_| rng.gen_range(0.1..2.0)).collect();
        let h = Hypergraph::new(n, r, Some(w), distinct_edges(&mut rng, n, r, m), Some(ew))?;
        let mu = [0.2, 0.3, 0.4, 0.5][rng.gen_range(0..4)];
        let scfg = SolverConfig { seed: case as u64, ..Default::default() };
        let res = solve_dksh_weighted(&h, mu, &scfg)?;
        let slack = mu * (1.0 + scfg.eta);
        let upper = brute_force_dksh(&h, slack.min(1.0), BiasMode::AtMost)?.value;
        let opt = brute_force_dksh(&h, mu, BiasMode::AtMost)?.value;
        rep.check(res.relative_weight <= slack + 1e-9 && res.value <= upper + 1e-9, || {
            format!("case {case}: weight {} value {} vs opt {upper}", res.relative_weight, res.value)
        });
        if res.value >= 2f64.powi(-4 * r as i32) * mu.powi(r as i32 - 1) * opt - 1e-12 {
            floor_hits += 1;
        }
    }
    let frac = floor_hits as f64 / cases as f64;
    rep.metric("floor_fraction", frac);
    rep.check(frac >= 0.9, || format!("floor met in {frac} of instances"));
    Ok(rep)
}

fn gadget_completeness(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("gadget-completeness");
    let samples = cfg.count(200_000) as u64;
    let hp = GadgetParams {
        mu: 0.1,
        rho: Some(0.5),
        r: 2,
        t: 4,
        samples,
        seed: cfg.seed,
        variant: HypercubeVariant::SharedTheta,
        ..Default::default()
    };
    let e = hypercube_acceptance(&hp, &Assignment::Dictator)?;
    rep.metric("hypercube_sigmas", e.sigmas_from(e.exact.unwrap_or(f64::NAN)));
    rep.check(e.sigmas_from(e.exact.unwrap_or(f64::NAN)) <= 3.0, || format!("hypercube {e:?}"));

    let (g, s) = RegularGraph::two_cliques(2)?;
    let sp = GadgetParams {
        mu: 0.3,
        rho: Some(0.6),
        beta: Some(0.4),
        eta: Some(0.1),
        r: 2,
        big_r: 4,
        samples,
        seed: cfg.seed,
        ..Default::default()
    };
    let e = sse_acceptance(&g, &s, &sp, &Assignment::Dictator)?;
    rep.metric("sse_sigmas", e.sigmas_from(e.exact.unwrap_or(f64::NAN)));
    rep.check(e.sigmas_from(e.exact.unwrap_or(f64::NAN)) <= 3.0, || format!("sse {e:?}"));

    let ug = UgInstance::cycle(5, 3, 1)?;
    let sigma = [0, 1, 2, 0, 1];
    let up = GadgetParams { rho: Some(0.5), eta: Some(0.05), r: 2, t: 3, label_size: 4, samples, seed: cfg.seed, ..Default::default() };
    let e = ug_acceptance(&ug, Some(&sigma), &up, &Assignment::Dictator)?;
    let bound = e.analytic_bound.unwrap_or(f64::NAN);
    rep.metric("ug_margin_sigmas", (e.estimate - bound) / e.stderr.max(f64::MIN_POSITIVE));
    rep.check(e.estimate >= bound - 3.0 * e.stderr, || format!("ug {e:?}"));
    Ok(rep)
}

fn gamma() -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("gamma");
    let grid = [0.1, 0.3, 0.5, 0.7, 0.9];
    let rhos = [0.0, 0.2, 0.4, 0.6, 0.8, 0.95];
    for &a in &grid {
        for &b in &grid {
            let g0 = gamma2(0.0, a, b)?;
            rep.check((g0 - a * b).abs() <= 1e-6, || format!("Γ₀({a},{b}) = {g0}"));
            let mut prev = f64::NEG_INFINITY;
            for &rho in &rhos {
                let (x, y) = (gamma2(rho, a, b)?, gamma2(rho, b, a)?);
                rep.check((x - y).abs() <= 1e-9 && x >= prev - 1e-12, || format!("ρ={rho} ({a},{b}): {x} vs {y}, prev {prev}"));
                prev = x;
            }
        }
    }
    let half = gamma2(0.5, 0.5, 0.5)?;
    rep.check((half - 1.0 / 3.0).abs() <= 1e-6, || format!("Γ_0.5(0.5,0.5) = {half}"));
    let mu = 1.0 / 16.0;
    for c in [1.0, 2.0, 4.0] {
        let rho = 1.0 / (2.0 * c * 9.0 * 16f64.ln());
        let g3 = gaussian_stability(rho, &[mu; 3])?;
        rep.metric(&format!("gamma3_over_mu3_c{c}"), g3 / mu.powi(3));
        rep.check(g3 <= 3.0 * mu.powi(3), || format!("C'={c}: Γ³ = {g3}"));
    }
    Ok(rep)
}

fn determinism(cfg: &VerifyConfig) -> Result<SuiteReport> {
    let mut rep = SuiteReport::new("determinism");
    let mut rng = rng_for(cfg.seed, &[0x6465_7465]);
    let n = 9;
    let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let h = Hypergraph::new(n, 3, Some(w), distinct_edges(&mut rng, n, 3, 12), None)?;
    let edges = distinct_edges(&mut rng, n, 2, 12);
    let csp = CspInstance::new(Hypergraph::uniform(n, 2, edges)?, Predicate::neq(), None)?;
    let run = || -> Result<String> {
        let scfg = SolverConfig { seed: cfg.seed, heavy_exponent: 2.0, ..Default::default() };
        let a = solve_dksh_weighted(&h, 0.3, &scfg)?;
        let b = solve_general(&csp, 0.3, &scfg)?;
        let gp = GadgetParams { samples: 20_000, seed: cfg.seed, ..Default::default() };
        let c = hypercube_acceptance(&gp, &Assignment::Dictator)?;
        serde_json::to_string(&(a, b, c)).map_err(|e| invalid(e.to_string()))
    };
    let mut outputs = Vec::new();
    for threads in [1, 4] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().map_err(|e| invalid(e.to_string()))?;
        for _ in 0..3 {
            outputs.push(pool.install(run)?);
        }
    }
    for (i, o) in outputs.iter().enumerate().skip(1) {
        rep.check(*o == outputs[0], || format!("run {i} differs"));
    }
    Ok(rep)
}
