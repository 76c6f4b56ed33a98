//! Dictatorship test over a Unique Games instance with `[R]`-valued long codes on
//! `[R]^t`, where `t` is the label count of the instance.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gadget::tabulated::TABLE_CAP;
use crate::gadget::{monte_carlo, Assignment, Estimate, GadgetParams, GadgetTest};

pub const UG_MAX_LABELS: usize = 8;
pub const UG_MAX_ALPHABET: usize = 8;

/// Constraint `σ(v) = perm[σ(u)]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UgEdge {
    pub u: usize,
    pub v: usize,
    pub perm: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "UgSpec", into = "UgSpec")]
pub struct UgInstance {
    n: usize,
    labels: usize,
    edges: Vec<UgEdge>,
    /// For each vertex, `(w, π_{w→v})` per incident edge.
    incoming: Vec<Vec<(usize, Vec<usize>)>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UgSpec {
    pub n: usize,
    pub labels: usize,
    pub edges: Vec<UgEdge>,
}

impl TryFrom<UgSpec> for UgInstance {
    type Error = Error;
    fn try_from(s: UgSpec) -> Result<Self> {
        UgInstance::new(s.n, s.labels, s.edges)
    }
}

impl From<UgInstance> for UgSpec {
    fn from(g: UgInstance) -> Self {
        UgSpec { n: g.n, labels: g.labels, edges: g.edges }
    }
}

fn inverse(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (a, &b) in perm.iter().enumerate() {
        inv[b] = a;
    }
    inv
}

impl UgInstance {
    pub fn new(n: usize, labels: usize, edges: Vec<UgEdge>) -> Result<Self> {
        if labels == 0 || labels > UG_MAX_LABELS {
            return Err(invalid(format!("label count must be in 1..={UG_MAX_LABELS}")));
        }
        if edges.is_empty() {
            return Err(invalid("instance has no edges"));
        }
        let mut incoming = vec![Vec::new(); n];
        for e in &edges {
            if e.u >= n || e.v >= n {
                return Err(invalid(format!("edge ({}, {}) out of range", e.u, e.v)));
            }
            let mut seen = vec![false; labels];
            if e.perm.len() != labels || e.perm.iter().any(|&a| a >= labels || std::mem::replace(&mut seen[a], true)) {
                return Err(invalid(format!("edge ({}, {}) does not carry a bijection on [{labels}]", e.u, e.v)));
            }
            incoming[e.v].push((e.u, e.perm.clone()));
            incoming[e.u].push((e.v, inverse(&e.perm)));
        }
        Ok(UgInstance { n, labels, edges, incoming })
    }

    /// Cycle `0 → 1 → … → n-1 → 0`, each constraint adding `shift` mod `labels`.
    pub fn cycle(n: usize, labels: usize, shift: usize) -> Result<Self> {
        let perm: Vec<usize> = (0..labels).map(|a| (a + shift) % labels.max(1)).collect();
        let edges = (0..n).map(|u| UgEdge { u, v: (u + 1) % n, perm: perm.clone() }).collect();
        Self::new(n, labels, edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn edges(&self) -> &[UgEdge] {
        &self.edges
    }

    /// Fraction of constraints satisfied by `sigma`.
    pub fn value(&self, sigma: &[usize]) -> Result<f64> {
        if sigma.len() != self.n || sigma.iter().any(|&a| a >= self.labels) {
            return Err(invalid("labeling does not match the instance"));
        }
        let sat = self.edges.iter().filter(|e| e.perm[sigma[e.u]] == sigma[e.v]).count();
        Ok(sat as f64 / self.edges.len() as f64)
    }

    fn degree(&self, v: usize) -> usize {
        self.incoming[v].len()
    }
}

/// `f̃(x) = f(x − x₀·𝟙) + x₀ (mod R)`, shifting every coordinate by the first one.
pub fn fold(f: impl Fn(&[usize]) -> usize, x: &[usize], big_r: usize) -> usize {
    let x0 = x[0];
    let shifted: Vec<usize> = x.iter().map(|&v| (v + big_r - x0) % big_r).collect();
    (f(&shifted) + x0) % big_r
}

/// Mixed-radix index of `x ∈ [R]^t`, coordinate 0 least significant.
pub fn long_code_index(x: &[usize], big_r: usize) -> usize {
    x.iter().rev().fold(0, |acc, &v| acc * big_r + v)
}

fn long_code_point(mut idx: usize, big_r: usize, t: usize) -> Vec<usize> {
    (0..t)
        .map(|_| {
            let v = idx % big_r;
            idx /= big_r;
            v
        })
        .collect()
}

/// Folded version of a long-code table.
pub fn fold_table(table: &[usize], big_r: usize, t: usize) -> Vec<usize> {
    (0..table.len())
        .map(|idx| fold(|y| table[long_code_index(y, big_r)], &long_code_point(idx, big_r, t), big_r))
        .collect()
}

/// Table of the dictator `x ↦ x(a)`.
pub fn dictator_table(a: usize, big_r: usize, t: usize) -> Vec<usize> {
    (0..big_r.pow(t as u32)).map(|idx| long_code_point(idx, big_r, t)[a]).collect()
}

/// The `k` queries of one run: the center vertex, its sampled neighbors, and for each
/// neighbor the point `π_{w→v} ∘ z'` at which its folded long code is read.
#[derive(Clone, Debug, PartialEq)]
pub struct UgDraw {
    pub v: usize,
    pub neighbors: Vec<usize>,
    pub theta: Vec<bool>,
    pub points: Vec<Vec<usize>>,
}

fn check(g: &UgInstance, p: &GadgetParams) -> Result<()> {
    if p.t != g.labels {
        return Err(invalid(format!("t = {} but the instance has {} labels", p.t, g.labels)));
    }
    if p.label_size > UG_MAX_ALPHABET {
        return Err(Error::CapExceeded {
            what: "long-code alphabet".into(),
            needed: p.label_size as u64,
            cap: UG_MAX_ALPHABET as u64,
        });
    }
    Ok(())
}

/// Draw one run of the test. `p` must be resolved.
pub fn ug_test_sample<R: Rng>(g: &UgInstance, p: &GadgetParams, rng: &mut R) -> UgDraw {
    let (k, t, big_r, rho, eta) = (p.r, p.t, p.label_size, p.rho(), p.eta());
    // Degree-proportional center makes each (v, w_i) a uniform constraint.
    let total: usize = (0..g.n).map(|v| g.degree(v)).sum();
    let mut pick = rng.gen_range(0..total);
    let v = (0..g.n)
        .find(|&v| {
            if pick < g.degree(v) {
                true
            } else {
                pick -= g.degree(v);
                false
            }
        })
        .expect("pick below total degree");
    let nb: Vec<&(usize, Vec<usize>)> = (0..k).map(|_| g.incoming[v].choose(rng).expect("center has neighbors")).collect();
    let z: Vec<usize> = (0..t).map(|_| rng.gen_range(0..big_r)).collect();
    let theta: Vec<bool> = (0..t).map(|_| rng.gen_bool(rho)).collect();
    let mut zs = vec![vec![0; t]; k];
    for i in 0..t {
        for zj in zs.iter_mut() {
            zj[i] = if theta[i] { z[i] } else { rng.gen_range(0..big_r) };
        }
    }
    let points = zs
        .iter()
        .zip(&nb)
        .map(|(zj, (_, perm))| {
            let zp: Vec<usize> = zj.iter().map(|&c| if rng.gen_bool(1.0 - eta) { c } else { rng.gen_range(0..big_r) }).collect();
            (0..t).map(|a| zp[perm[a]]).collect()
        })
        .collect();
    UgDraw { v, neighbors: nb.iter().map(|(w, _)| *w).collect(), theta, points }
}

/// Long codes the test reads: dictators on `sigma`, a constant label, or tables.
pub enum LongCodes<'a> {
    Dictator(&'a [usize]),
    Constant(usize),
    Tables(&'a [Vec<usize>]),
}

impl LongCodes<'_> {
    fn folded(&self, w: usize, y: &[usize], big_r: usize) -> usize {
        match self {
            LongCodes::Dictator(sigma) => fold(|x| x[sigma[w]], y, big_r),
            LongCodes::Constant(c) => fold(|_| *c, y, big_r),
            LongCodes::Tables(t) => fold(|x| t[w][long_code_index(x, big_r)], y, big_r),
        }
    }
}

fn resolve_codes<'a>(g: &UgInstance, p: &GadgetParams, a: &'a Assignment, sigma: Option<&'a [usize]>) -> Result<LongCodes<'a>> {
    let big_r = p.label_size;
    match a {
        Assignment::Dictator => {
            let s = sigma.ok_or_else(|| invalid("dictator assignment needs a labeling"))?;
            g.value(s)?;
            Ok(LongCodes::Dictator(s))
        }
        Assignment::Constant(c) => {
            if c.fract() != 0.0 || *c < 0.0 || *c >= big_r as f64 {
                return Err(invalid(format!("constant label {c} not in [0, {big_r})")));
            }
            Ok(LongCodes::Constant(*c as usize))
        }
        Assignment::LongCodes(tables) => {
            let len = big_r.checked_pow(p.t as u32).filter(|&l| l <= TABLE_CAP).ok_or(Error::CapExceeded {
                what: "long-code table".into(),
                needed: (big_r as u64).saturating_pow(p.t as u32),
                cap: TABLE_CAP as u64,
            })?;
            if tables.len() != g.n || tables.iter().any(|t| t.len() != len || t.iter().any(|&c| c >= big_r)) {
                return Err(invalid(format!("need {} tables of {len} labels below {big_r}", g.n)));
            }
            Ok(LongCodes::Tables(tables))
        }
        Assignment::Table(_) => Err(invalid("the UG test reads per-vertex long codes, not a single table")),
    }
}

/// Exact dictator acceptance. Reading coordinate `a_j = π_{w_j→v}(σ(w_j))` of `z'_j`,
/// coordinates are independent, and a group of `m` queries on one coordinate all
/// show a fixed label with probability
/// `q(m) = ρ/R·[(1-η+η/R)^m + (R-1)(η/R)^m] + (1-ρ)R^{-m}`.
pub fn exact_dictator_acceptance(g: &UgInstance, sigma: &[usize], params: &GadgetParams) -> Result<f64> {
    let p = params.resolve(GadgetTest::Ug)?;
    check(g, &p)?;
    g.value(sigma)?;
    let (k, big_r, rho, eta) = (p.r, p.label_size as f64, p.rho(), p.eta());
    let q = |m: i32| {
        rho / big_r * ((1.0 - eta + eta / big_r).powi(m) + (big_r - 1.0) * (eta / big_r).powi(m))
            + (1.0 - rho) * big_r.powi(-m)
    };
    let total_deg: usize = (0..g.n).map(|v| g.degree(v)).sum();
    let mut work = 0u64;
    for v in 0..g.n {
        work = work.saturating_add((g.degree(v) as u64).saturating_pow(k as u32));
    }
    if work > TABLE_CAP as u64 {
        return Err(Error::CapExceeded { what: "neighbor tuples".into(), needed: work, cap: TABLE_CAP as u64 });
    }
    let mut acc = 0.0;
    for v in (0..g.n).filter(|&v| g.degree(v) > 0) {
        let d = g.degree(v);
        let pv = d as f64 / total_deg as f64;
        let tuples = d.pow(k as u32);
        let mut sum = 0.0;
        for mut idx in 0..tuples {
            let mut groups = vec![0i32; g.labels];
            for _ in 0..k {
                let (w, perm) = &g.incoming[v][idx % d];
                idx /= d;
                groups[perm[sigma[*w]]] += 1;
            }
            sum += big_r * groups.iter().filter(|&&m| m > 0).map(|&m| q(m)).product::<f64>();
        }
        acc += pv * sum / tuples as f64;
    }
    Ok(acc)
}

/// `(1 − ε_c k)·ρ(1 − ηk)` with `ε_c = 1 − Val(σ)`.
pub fn completeness_bound(g: &UgInstance, sigma: &[usize], p: &GadgetParams) -> Result<f64> {
    let k = p.r as f64;
    let eps = 1.0 - g.value(sigma)?;
    Ok((1.0 - eps * k) * p.rho() * (1.0 - p.eta() * k))
}

/// Monte Carlo acceptance. `sigma` is required for the dictator assignment.
pub fn ug_acceptance(g: &UgInstance, sigma: Option<&[usize]>, params: &GadgetParams, a: &Assignment) -> Result<Estimate> {
    let p = params.resolve(GadgetTest::Ug)?;
    check(g, &p)?;
    let codes = resolve_codes(g, &p, a, sigma)?;
    let big_r = p.label_size;
    let mut est = monte_carlo(p.samples, p.seed, |rng| {
        let d = ug_test_sample(g, &p, rng);
        let first = codes.folded(d.neighbors[0], &d.points[0], big_r);
        let all = d.neighbors.iter().zip(&d.points).all(|(&w, y)| codes.folded(w, y, big_r) == first);
        f64::from(u8::from(all))
    });
    if let LongCodes::Dictator(s) = codes {
        est.exact = exact_dictator_acceptance(g, s, &p).ok();
        est.analytic_bound = Some(completeness_bound(g, s, &p)?);
    }
    Ok(est)
}
