//! Dictatorship test over a small-set-expansion graph. A query is a triple
//! `(B, x, z) ∈ V^R × {0,1}^R × {⊥,⊤}^R`; `true` in `z` stands for ⊤.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::gadget::space::FiniteSpace;
use crate::gadget::tabulated::TABLE_CAP;
use crate::gadget::{monte_carlo, Assignment, Estimate, GadgetParams, GadgetTest};

pub const SSE_MAX_VERTICES: usize = 64;
pub const SSE_MAX_COORDINATES: usize = 16;

/// Undirected regular graph given by symmetric adjacency lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<usize>>", into = "Vec<Vec<usize>>")]
pub struct RegularGraph {
    adj: Vec<Vec<usize>>,
}

impl TryFrom<Vec<Vec<usize>>> for RegularGraph {
    type Error = Error;
    fn try_from(adj: Vec<Vec<usize>>) -> Result<Self> {
        RegularGraph::new(adj)
    }
}

impl From<RegularGraph> for Vec<Vec<usize>> {
    fn from(g: RegularGraph) -> Self {
        g.adj
    }
}

impl RegularGraph {
    pub fn new(adj: Vec<Vec<usize>>) -> Result<Self> {
        let n = adj.len();
        if n == 0 || n > SSE_MAX_VERTICES {
            return Err(invalid(format!("graph must have 1..={SSE_MAX_VERTICES} vertices, got {n}")));
        }
        let d = adj[0].len();
        if d == 0 || adj.iter().any(|a| a.len() != d) {
            return Err(invalid("graph must be regular with positive degree"));
        }
        for (u, a) in adj.iter().enumerate() {
            for &v in a {
                if v >= n {
                    return Err(invalid(format!("neighbor {v} out of range")));
                }
                let back = adj[v].iter().filter(|&&w| w == u).count();
                let forth = a.iter().filter(|&&w| w == v).count();
                if back != forth {
                    return Err(invalid(format!("adjacency is not symmetric at ({u}, {v})")));
                }
            }
        }
        Ok(RegularGraph { adj })
    }

    /// Two disjoint copies of `K_m`, with the first copy as planted set.
    pub fn two_cliques(m: usize) -> Result<(RegularGraph, Vec<bool>)> {
        if m < 2 {
            return Err(invalid("cliques need at least two vertices"));
        }
        let adj = (0..2 * m)
            .map(|v| {
                let base = v / m * m;
                (base..base + m).filter(|&w| w != v).collect()
            })
            .collect();
        let planted = (0..2 * m).map(|v| v < m).collect();
        Ok((RegularGraph::new(adj)?, planted))
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn degree(&self) -> usize {
        self.adj[0].len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    /// One step of `G_η`: a random-walk step w.p. `1-η`, else a stationary (uniform) vertex.
    pub fn noisy_step<R: Rng>(&self, v: usize, eta: f64, rng: &mut R) -> usize {
        if rng.gen_bool(eta) {
            rng.gen_range(0..self.n())
        } else {
            *self.adj[v].choose(rng).expect("positive degree")
        }
    }

    /// Fraction of edge endpoints in `s` whose other end leaves `s`.
    pub fn expansion(&self, s: &[bool]) -> f64 {
        let (mut out, mut total) = (0usize, 0usize);
        for u in (0..self.n()).filter(|&u| s[u]) {
            total += self.degree();
            out += self.adj[u].iter().filter(|&&v| !s[v]).count();
        }
        if total == 0 {
            0.0
        } else {
            out as f64 / total as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SsePoint {
    pub b: Vec<usize>,
    pub x: Vec<bool>,
    pub z: Vec<bool>,
}

impl SsePoint {
    /// Position `perm[i]` receives coordinate `i`.
    pub fn permuted(&self, perm: &[usize]) -> SsePoint {
        let mut out = self.clone();
        for (i, &p) in perm.iter().enumerate() {
            out.b[p] = self.b[i];
            out.x[p] = self.x[i];
            out.z[p] = self.z[i];
        }
        out
    }
}

/// One run of the test: the center `(A, x, z)`, the shared-noise pattern θ, and the
/// `r` queries before and after the random permutations.
#[derive(Clone, Debug, PartialEq)]
pub struct SseDraw {
    pub center: SsePoint,
    pub theta: Vec<bool>,
    pub unpermuted: Vec<SsePoint>,
    pub perms: Vec<Vec<usize>>,
    pub queries: Vec<SsePoint>,
}

fn check_scale(g: &RegularGraph, s: &[bool], p: &GadgetParams) -> Result<()> {
    if s.len() != g.n() {
        return Err(invalid(format!("planted set has length {}, graph has {} vertices", s.len(), g.n())));
    }
    if p.big_r > SSE_MAX_COORDINATES {
        return Err(Error::CapExceeded {
            what: "SSE coordinates".into(),
            needed: p.big_r as u64,
            cap: SSE_MAX_COORDINATES as u64,
        });
    }
    Ok(())
}

/// Draw the `r` queries of one test run. `p` must be resolved.
pub fn sse_test_sample<R: Rng>(g: &RegularGraph, p: &GadgetParams, rng: &mut R) -> Result<SseDraw> {
    let (r, big_r, eta, rho) = (p.r, p.big_r, p.eta(), p.rho());
    let bit = FiniteSpace::biased_bit(p.mu)?;
    let top = FiniteSpace::biased_bit(p.beta())?;
    let n = g.n();
    let mut center = SsePoint { b: vec![0; big_r], x: vec![false; big_r], z: vec![false; big_r] };
    let mut theta = vec![false; big_r];
    let mut out = vec![center.clone(); r];
    for i in 0..big_r {
        let a = rng.gen_range(0..n);
        center.b[i] = a;
        center.x[i] = bit.sample(rng) == 1;
        center.z[i] = top.sample(rng) == 1;
        theta[i] = rng.gen_bool(rho);
        for q in out.iter_mut() {
            let bj = g.noisy_step(a, eta, rng);
            let (xj, zj) =
                if theta[i] { (center.x[i], center.z[i]) } else { (bit.sample(rng) == 1, top.sample(rng) == 1) };
            // (1-η)-correlated copy in the joint space {0,1}_μ ⊗ {⊥,⊤}_β.
            let (xh, zp) = if rng.gen_bool(1.0 - eta) { (xj, zj) } else { (bit.sample(rng) == 1, top.sample(rng) == 1) };
            q.b[i] = bj;
            q.x[i] = xh;
            q.z[i] = zp;
        }
    }
    for q in out.iter_mut() {
        let (b, x) = leakage(n, &q.b, &q.x, &q.z, &bit, rng);
        q.b = b;
        q.x = x;
    }
    let perms: Vec<Vec<usize>> = (0..r)
        .map(|_| {
            let mut perm: Vec<usize> = (0..big_r).collect();
            perm.shuffle(rng);
            perm
        })
        .collect();
    let queries = out.iter().zip(&perms).map(|(q, perm)| q.permuted(perm)).collect();
    Ok(SseDraw { center, theta, unpermuted: out, perms, queries })
}

/// `M_z`: coordinates with `z = ⊤` keep `(B, x)`, the rest are redrawn from
/// `V × {0,1}_μ`.
pub fn leakage<R: Rng>(
    n: usize,
    b: &[usize],
    x: &[bool],
    z: &[bool],
    bit: &FiniteSpace,
    rng: &mut R,
) -> (Vec<usize>, Vec<bool>) {
    let mut b = b.to_vec();
    let mut x = x.to_vec();
    for i in (0..z.len()).filter(|&i| !z[i]) {
        b[i] = rng.gen_range(0..n);
        x[i] = bit.sample(rng) == 1;
    }
    (b, x)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DictatorChoice {
    /// Coordinates whose vertex is planted and whose `z` is ⊤.
    pub pi: Vec<usize>,
    pub i_star: usize,
    pub unique: bool,
}

/// The honest strategy's coordinate: the unique planted-and-⊤ coordinate, else 0.
pub fn dictator_strategy(a: &[usize], z: &[bool], s: &[bool]) -> DictatorChoice {
    let pi: Vec<usize> = (0..a.len()).filter(|&i| z[i] && s[a[i]]).collect();
    let unique = pi.len() == 1;
    let i_star = if unique { pi[0] } else { 0 };
    DictatorChoice { pi, i_star, unique }
}

fn table_point(q: &SsePoint) -> Vec<usize> {
    q.b.iter().copied().chain(q.x.iter().map(|&b| usize::from(b))).chain(q.z.iter().map(|&b| usize::from(b))).collect()
}

fn check_assignment(g: &RegularGraph, p: &GadgetParams, a: &Assignment) -> Result<()> {
    match a {
        Assignment::Dictator => Ok(()),
        Assignment::Constant(v) if (0.0..=1.0).contains(v) => Ok(()),
        Assignment::Constant(v) => Err(invalid(format!("constant {v} outside [0, 1]"))),
        Assignment::Table(f) => {
            let big_r = p.big_r;
            let ok = f.dims() == 3 * big_r
                && f.spaces().iter().enumerate().all(|(i, s)| s.size() == if i < big_r { g.n() } else { 2 });
            if !ok {
                return Err(invalid(format!("table must be defined on V^{big_r} x {{0,1}}^{big_r} x {{0,1}}^{big_r}")));
            }
            if f.values().iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(invalid("table values must lie in [0, 1]"));
            }
            Ok(())
        }
        Assignment::LongCodes(_) => Err(invalid("long codes are not an assignment for the SSE test")),
    }
}

fn eval(a: &Assignment, s: &[bool], q: &SsePoint) -> f64 {
    match a {
        Assignment::Dictator => f64::from(u8::from(q.x[dictator_strategy(&q.b, &q.z, s).i_star])),
        Assignment::Constant(v) => *v,
        Assignment::Table(f) => f.eval(&table_point(q)),
        Assignment::LongCodes(_) => unreachable!("rejected by check_assignment"),
    }
}

/// Per-coordinate law of `(s_j, x'_j)_{j<r}`, where `s_j` says the query's vertex is
/// planted and its `z` is ⊤. Outcome `j` sits in bits `2j` (`s_j`) and `2j+1` (`x'_j`).
fn coordinate_law(g: &RegularGraph, s: &[bool], p: &GadgetParams) -> Vec<f64> {
    let (r, mu, beta, eta, rho) = (p.r, p.mu, p.beta(), p.eta(), p.rho());
    let n = g.n() as f64;
    let planted = s.iter().filter(|&&b| b).count() as f64 / n;
    let px = |b: bool| if b { mu } else { 1.0 - mu };
    let pz = |b: bool| if b { beta } else { 1.0 - beta };
    let pairs = [(false, false), (false, true), (true, false), (true, true)];
    let mut law = vec![0.0; 1 << (2 * r)];
    for a in 0..g.n() {
        let hits = g.neighbors(a).iter().filter(|&&v| s[v]).count() as f64 / g.degree() as f64;
        let in_s = (1.0 - eta) * hits + eta * planted;
        for theta in [false, true] {
            for &(x, z) in &pairs {
                let base = (1.0 / n) * if theta { rho } else { 1.0 - rho } * px(x) * pz(z);
                // q[o] for one query, o = s + 2·x'.
                let mut q = [0.0; 4];
                for &(xj, zj) in &pairs {
                    let p1 = if theta { f64::from(u8::from((xj, zj) == (x, z))) } else { px(xj) * pz(zj) };
                    for &(xh, zp) in &pairs {
                        let p2 = (1.0 - eta) * f64::from(u8::from((xh, zp) == (xj, zj))) + eta * px(xh) * pz(zp);
                        let w = p1 * p2;
                        if w == 0.0 {
                            continue;
                        }
                        if zp {
                            let o = 2 * usize::from(xh);
                            q[o + 1] += w * in_s;
                            q[o] += w * (1.0 - in_s);
                        } else {
                            q[0] += w * (1.0 - mu);
                            q[2] += w * mu;
                        }
                    }
                }
                for (o, l) in law.iter_mut().enumerate() {
                    *l += base * (0..r).map(|j| q[o >> (2 * j) & 3]).product::<f64>();
                }
            }
        }
    }
    law
}

/// Exact dictator acceptance by enumerating every per-coordinate outcome; needs
/// `4^{rR}` within the table cap. The random permutations make the fallback
/// coordinate uniform when the planted-and-⊤ set is not a singleton.
pub fn exact_dictator_acceptance(g: &RegularGraph, s: &[bool], params: &GadgetParams) -> Result<f64> {
    let p = params.resolve(GadgetTest::Sse)?;
    check_scale(g, s, &p)?;
    let (r, big_r) = (p.r, p.big_r);
    let bits = 2 * r * big_r;
    if bits > TABLE_CAP.trailing_zeros() as usize {
        return Err(Error::CapExceeded {
            what: "SSE outcome tuples".into(),
            needed: 1u64.checked_shl(bits as u32).unwrap_or(u64::MAX),
            cap: TABLE_CAP as u64,
        });
    }
    let law = coordinate_law(g, s, &p);
    let width = 2 * r;
    let mask = (1usize << width) - 1;
    let mut total = 0.0;
    let mut outcomes = vec![0usize; big_r];
    for idx in 0..1usize << bits {
        let mut prob = 1.0;
        for (i, o) in outcomes.iter_mut().enumerate() {
            *o = idx >> (width * i) & mask;
            prob *= law[*o];
        }
        if prob == 0.0 {
            continue;
        }
        let mut acc = 1.0;
        for j in 0..r {
            let hit: Vec<usize> = (0..big_r).filter(|&i| outcomes[i] >> (2 * j) & 1 == 1).collect();
            let xbit = |i: usize| f64::from(u8::from(outcomes[i] >> (2 * j + 1) & 1 == 1));
            acc *= if hit.len() == 1 { xbit(hit[0]) } else { (0..big_r).map(xbit).sum::<f64>() / big_r as f64 };
        }
        total += prob * acc;
    }
    Ok(total)
}

/// Monte Carlo acceptance of the test on `g` with planted set `s`.
pub fn sse_acceptance(g: &RegularGraph, s: &[bool], params: &GadgetParams, a: &Assignment) -> Result<Estimate> {
    let p = params.resolve(GadgetTest::Sse)?;
    check_scale(g, s, &p)?;
    check_assignment(g, &p, a)?;
    let mut est = monte_carlo(p.samples, p.seed, |rng| {
        let draw = sse_test_sample(g, &p, rng).expect("parameters validated");
        draw.queries.iter().map(|q| eval(a, s, q)).product()
    });
    est.exact = match a {
        Assignment::Dictator => exact_dictator_acceptance(g, s, &p).ok(),
        Assignment::Constant(v) => Some(v.powi(p.r as i32)),
        _ => None,
    };
    Ok(est)
}
