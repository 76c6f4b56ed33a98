//! Oracles written independently of the library code they check.

#![allow(dead_code)]

use std::collections::HashMap;

/// Accepting strings that contain no other accepting string, by pairwise comparison.
pub fn minimal_by_containment(accepting: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    for &x in accepting {
        let mut minimal = true;
        for &y in accepting {
            if y != x && (y | x) == x {
                minimal = false;
            }
        }
        if minimal {
            out.push(x);
        }
    }
    out.sort_unstable();
    out
}

pub fn shared_theta_dictator(mu: f64, rho: f64, r: i32) -> f64 {
    let keep = rho * rho;
    keep * mu + (1.0 - keep) * mu.powi(r)
}

pub struct SseSetup<'a> {
    pub adj: &'a [Vec<usize>],
    pub planted: &'a [bool],
    pub mu: f64,
    pub beta: f64,
    pub rho: f64,
    pub eta: f64,
    pub r: usize,
    pub big_r: usize,
}

type Query = (usize, bool, bool);

fn bern(p: f64) -> [(bool, f64); 2] {
    [(false, 1.0 - p), (true, p)]
}

/// Law of one query coordinate given the center `(a, x, z, θ)`, by walking every
/// random choice of the sampler.
fn one_query(s: &SseSetup, a: usize, x: bool, z: bool, theta: bool) -> HashMap<Query, f64> {
    let n = s.adj.len();
    let mut steps: HashMap<usize, f64> = HashMap::new();
    for v in 0..n {
        *steps.entry(v).or_default() += s.eta / n as f64;
    }
    for &v in &s.adj[a] {
        *steps.entry(v).or_default() += (1.0 - s.eta) / s.adj[a].len() as f64;
    }
    let mut pre: Vec<((bool, bool), f64)> = Vec::new();
    if theta {
        pre.push(((x, z), 1.0));
    } else {
        for (xj, px) in bern(s.mu) {
            for (zj, pz) in bern(s.beta) {
                pre.push(((xj, zj), px * pz));
            }
        }
    }
    let mut out: HashMap<Query, f64> = HashMap::new();
    for (&bj, &pb) in &steps {
        for &((xj, zj), pj) in &pre {
            let mut copies = vec![((xj, zj), 1.0 - s.eta)];
            for (xf, px) in bern(s.mu) {
                for (zf, pz) in bern(s.beta) {
                    copies.push(((xf, zf), s.eta * px * pz));
                }
            }
            for ((xh, zp), pc) in copies {
                let w = pb * pj * pc;
                if zp {
                    *out.entry((bj, xh, zp)).or_default() += w;
                } else {
                    for v in 0..n {
                        for (xl, pl) in bern(s.mu) {
                            *out.entry((v, xl, zp)).or_default() += w * pl / n as f64;
                        }
                    }
                }
            }
        }
    }
    out
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..k {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Exact acceptance of the honest dictator strategy in the SSE noise test, by
/// enumerating the sampler's choices coordinate by coordinate and every permutation.
pub fn sse_dictator_by_enumeration(s: &SseSetup) -> f64 {
    let n = s.adj.len();
    // Per coordinate: law of ((planted ∧ ⊤, x) for each query), keyed as a vector.
    let mut coord: HashMap<Vec<(bool, bool)>, f64> = HashMap::new();
    for a in 0..n {
        for (x, px) in bern(s.mu) {
            for (z, pz) in bern(s.beta) {
                for (theta, pt) in bern(s.rho) {
                    let base = px * pz * pt / n as f64;
                    let q = one_query(s, a, x, z, theta);
                    let mut tuples: Vec<(Vec<(bool, bool)>, f64)> = vec![(vec![], base)];
                    for _ in 0..s.r {
                        let mut next = Vec::new();
                        for (t, w) in &tuples {
                            for (&(b, xq, zq), &pq) in &q {
                                let mut t2 = t.clone();
                                t2.push((zq && s.planted[b], xq));
                                next.push((t2, w * pq));
                            }
                        }
                        tuples = next;
                    }
                    for (t, w) in tuples {
                        *coord.entry(t).or_default() += w;
                    }
                }
            }
        }
    }
    let coord: Vec<(Vec<(bool, bool)>, f64)> = coord.into_iter().collect();
    let perms = permutations(s.big_r);
    let mut total = 0.0;
    let mut idx = vec![0usize; s.big_r];
    loop {
        let prob: f64 = idx.iter().map(|&i| coord[i].1).product();
        if prob > 0.0 {
            let mut acc = 1.0;
            for j in 0..s.r {
                let cols: Vec<(bool, bool)> = idx.iter().map(|&i| coord[i].0[j]).collect();
                let mut avg = 0.0;
                for perm in &perms {
                    // Position perm[i] holds coordinate i.
                    let mut point = vec![(false, false); s.big_r];
                    for (i, &c) in cols.iter().enumerate() {
                        point[perm[i]] = c;
                    }
                    let hits: Vec<usize> = (0..s.big_r).filter(|&p| point[p].0).collect();
                    let pick = if hits.len() == 1 { hits[0] } else { 0 };
                    avg += f64::from(u8::from(point[pick].1));
                }
                acc *= avg / perms.len() as f64;
            }
            total += prob * acc;
        }
        let mut k = 0;
        loop {
            if k == s.big_r {
                return total;
            }
            idx[k] += 1;
            if idx[k] < coord.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn two_cliques_adj(m: usize) -> (Vec<Vec<usize>>, Vec<bool>) {
    let adj = (0..2 * m).map(|v| (v / m * m..v / m * m + m).filter(|&w| w != v).collect()).collect();
    (adj, (0..2 * m).map(|v| v < m).collect())
}
