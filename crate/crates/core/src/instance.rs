//! Weighted hypergraphs, labelings, CSP instances and their objective values.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::predicate::Predicate;

/// Absolute tolerance for weight comparisons.
pub const WEIGHT_TOL: f64 = 1e-9;
/// Largest arity accepted anywhere.
pub const MAX_ARITY: usize = 16;

/// A 0/1 assignment to the vertices. Serialized as a bit string, vertex 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Labeling(Vec<bool>);

impl Labeling {
    pub fn new(bits: Vec<bool>) -> Self {
        Labeling(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Labeling(vec![false; n])
    }

    pub fn ones(n: usize) -> Self {
        Labeling(vec![true; n])
    }

    pub fn from_support(n: usize, support: &[usize]) -> Self {
        let mut bits = vec![false; n];
        for &v in support {
            bits[v] = true;
        }
        Labeling(bits)
    }

    /// Bit `i` of the mask is vertex `i`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Labeling((0..n).map(|i| mask >> i & 1 == 1).collect())
    }

    pub fn from_bitstring(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                _ => Err(invalid(format!("labeling bit string contains {c:?}"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Labeling)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        self.0[i] = bit;
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.0
    }

    pub fn count_ones(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.0[i]).collect()
    }

    pub fn complement(&self) -> Self {
        Labeling(self.0.iter().map(|b| !b).collect())
    }

    /// Bit `i` of the result is vertex `i`. Requires `len() <= 64`.
    pub fn to_mask(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &b)| if b { m | 1 << i } else { m })
    }
}

impl fmt::Display for Labeling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl From<Labeling> for String {
    fn from(l: Labeling) -> String {
        l.to_string()
    }
}

impl TryFrom<String> for Labeling {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Labeling::from_bitstring(&s)
    }
}

/// Whether the weight constraint is an upper bound or an equality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiasMode {
    AtMost,
    Exactly,
}

fn check_weights(name: &str, ws: &[f64]) -> Result<()> {
    for (i, &w) in ws.iter().enumerate() {
        if !w.is_finite() || w < 0.0 {
            return Err(invalid(format!("{name}[{i}] = {w} is not a finite non-negative weight")));
        }
    }
    Ok(())
}

/// A vertex- and edge-weighted hypergraph. Edges are ordered tuples of length at most
/// `arity`; an edge is satisfied by a labeling when all its vertices are labeled 1.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypergraph {
    n: usize,
    arity: usize,
    vertex_weights: Vec<f64>,
    edges: Vec<Vec<usize>>,
    edge_weights: Vec<f64>,
    allow_empty_edges: bool,
}

impl Hypergraph {
    /// Missing vertex weights default to uniform 1, missing edge weights to 1.
    pub fn new(
        n: usize,
        arity: usize,
        vertex_weights: Option<Vec<f64>>,
        edges: Vec<Vec<usize>>,
        edge_weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        Self::build(n, arity, vertex_weights, edges, edge_weights, false)
    }

    /// Like [`Hypergraph::new`] but accepts empty edges, which every labeling satisfies.
    pub fn new_allowing_empty(
        n: usize,
        arity: usize,
        vertex_weights: Option<Vec<f64>>,
        edges: Vec<Vec<usize>>,
        edge_weights: Option<Vec<f64>>,
    ) -> Result<Self> {
        Self::build(n, arity, vertex_weights, edges, edge_weights, true)
    }

    /// Uniform vertex weights and unit edge weights.
    pub fn uniform(n: usize, arity: usize, edges: Vec<Vec<usize>>) -> Result<Self> {
        Self::new(n, arity, None, edges, None)
    }

    fn build(
        n: usize,
        arity: usize,
        vertex_weights: Option<Vec<f64>>,
        edges: Vec<Vec<usize>>,
        edge_weights: Option<Vec<f64>>,
        allow_empty_edges: bool,
    ) -> Result<Self> {
        if n == 0 {
            return Err(invalid("hypergraph needs at least one vertex"));
        }
        if arity == 0 || arity > MAX_ARITY {
            return Err(invalid(format!("arity {arity} outside 1..={MAX_ARITY}")));
        }
        let vertex_weights = vertex_weights.unwrap_or_else(|| vec![1.0; n]);
        if vertex_weights.len() != n {
            return Err(invalid(format!(
                "vertex_weights has {} entries for {n} vertices",
                vertex_weights.len()
            )));
        }
        check_weights("vertex_weights", &vertex_weights)?;
        if vertex_weights.iter().sum::<f64>() <= 0.0 {
            return Err(invalid("total vertex weight is zero"));
        }
        let edge_weights = edge_weights.unwrap_or_else(|| vec![1.0; edges.len()]);
        if edge_weights.len() != edges.len() {
            return Err(invalid(format!(
                "edge_weights has {} entries for {} edges",
                edge_weights.len(),
                edges.len()
            )));
        }
        check_weights("edge_weights", &edge_weights)?;
        for (k, e) in edges.iter().enumerate() {
            if e.len() > arity {
                return Err(invalid(format!("edge {k} has {} vertices, arity is {arity}", e.len())));
            }
            if e.is_empty() && !allow_empty_edges {
                return Err(invalid(format!("edge {k} is empty")));
            }
            if let Some(&v) = e.iter().find(|&&v| v >= n) {
                return Err(invalid(format!("edge {k} references vertex {v} >= n = {n}")));
            }
        }
        Ok(Hypergraph { n, arity, vertex_weights, edges, edge_weights, allow_empty_edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn vertex_weights(&self) -> &[f64] {
        &self.vertex_weights
    }

    pub fn edges(&self) -> &[Vec<usize>] {
        &self.edges
    }

    pub fn edge_weights(&self) -> &[f64] {
        &self.edge_weights
    }

    pub fn allows_empty_edges(&self) -> bool {
        self.allow_empty_edges
    }

    pub fn total_vertex_weight(&self) -> f64 {
        self.vertex_weights.iter().sum()
    }

    pub fn total_edge_weight(&self) -> f64 {
        self.edge_weights.iter().sum()
    }

    pub fn is_uniform(&self) -> bool {
        self.vertex_weights.iter().all(|&w| w == self.vertex_weights[0])
    }

    /// Same hypergraph with vertex weights scaled to sum to one.
    pub fn normalized(&self) -> Hypergraph {
        let total = self.total_vertex_weight();
        let mut h = self.clone();
        h.vertex_weights.iter_mut().for_each(|w| *w /= total);
        h
    }

    /// Merge edges with identical tuples, summing their weights. First occurrence order is kept.
    pub fn merge_duplicate_edges(&self) -> Hypergraph {
        let mut index: std::collections::HashMap<&[usize], usize> = std::collections::HashMap::new();
        let mut edges: Vec<Vec<usize>> = Vec::new();
        let mut weights: Vec<f64> = Vec::new();
        for (e, &w) in self.edges.iter().zip(&self.edge_weights) {
            match index.get(e.as_slice()) {
                Some(&k) => weights[k] += w,
                None => {
                    index.insert(e.as_slice(), edges.len());
                    edges.push(e.clone());
                    weights.push(w);
                }
            }
        }
        Hypergraph { edges, edge_weights: weights, ..self.clone() }
    }

    fn check_len(&self, sigma: &Labeling) -> Result<()> {
        if sigma.len() != self.n {
            return Err(invalid(format!("labeling has {} bits for {} vertices", sigma.len(), self.n)));
        }
        Ok(())
    }

    pub(crate) fn weight_of(&self, sigma: &Labeling) -> f64 {
        sigma
            .bits()
            .iter()
            .zip(&self.vertex_weights)
            .filter(|(&b, _)| b)
            .map(|(_, &w)| w)
            .fold(0.0, |a, w| a + w)
            / self.total_vertex_weight()
    }

    pub(crate) fn value_of(&self, sigma: &Labeling) -> f64 {
        let total = self.total_edge_weight();
        if total <= 0.0 {
            return 0.0;
        }
        let bits = sigma.bits();
        let sat: f64 = self
            .edges
            .iter()
            .zip(&self.edge_weights)
            .filter(|(e, _)| e.iter().all(|&v| bits[v]))
            .map(|(_, &w)| w)
            .fold(0.0, |a, w| a + w);
        sat / total
    }

    /// Weight of satisfied edges, not normalized.
    pub fn satisfied_weight(&self, sigma: &Labeling) -> Result<f64> {
        self.check_len(sigma)?;
        Ok(self.value_of(sigma) * self.total_edge_weight())
    }
}

/// A weighted CSP: hypergraph of exact arity `r`, a predicate, optional bias and
/// optional per-edge negation patterns.
#[derive(Clone, Debug, PartialEq)]
pub struct CspInstance {
    graph: Hypergraph,
    predicate: Predicate,
    bias: Option<f64>,
    /// Per edge, bit `r-1-j` set when coordinate `j` is negated.
    negations: Option<Vec<u32>>,
}

impl CspInstance {
    pub fn new(graph: Hypergraph, predicate: Predicate, bias: Option<f64>) -> Result<Self> {
        let r = predicate.arity();
        if graph.arity() != r {
            return Err(invalid(format!(
                "hypergraph arity {} differs from predicate arity {r}",
                graph.arity()
            )));
        }
        if let Some(k) = graph.edges().iter().position(|e| e.len() != r) {
            return Err(invalid(format!("edge {k} has {} vertices, expected {r}", graph.edges()[k].len())));
        }
        if let Some(mu) = bias {
            check_bias(mu)?;
        }
        Ok(CspInstance { graph, predicate, bias, negations: None })
    }

    /// Attach negation patterns given as ±1 per coordinate.
    pub fn with_negations(mut self, patterns: &[Vec<i8>]) -> Result<Self> {
        let r = self.predicate.arity();
        if patterns.len() != self.graph.edges().len() {
            return Err(invalid(format!(
                "{} negation patterns for {} edges",
                patterns.len(),
                self.graph.edges().len()
            )));
        }
        let mut flips = Vec::with_capacity(patterns.len());
        for (k, p) in patterns.iter().enumerate() {
            if p.len() != r {
                return Err(invalid(format!("negation pattern {k} has length {}, expected {r}", p.len())));
            }
            let mut flip = 0u32;
            for (j, &s) in p.iter().enumerate() {
                match s {
                    1 => {}
                    -1 => flip |= 1 << (r - 1 - j),
                    _ => return Err(invalid(format!("negation pattern {k} has entry {s}, expected ±1"))),
                }
            }
            flips.push(flip);
        }
        self.negations = Some(flips);
        Ok(self)
    }

    /// Attach negation patterns given as flip masks (bit `r-1-j` negates coordinate `j`).
    pub fn with_flip_masks(mut self, flips: Vec<u32>) -> Result<Self> {
        if flips.len() != self.graph.edges().len() {
            return Err(invalid("one flip mask per edge required"));
        }
        let limit = 1u32 << self.predicate.arity();
        if flips.iter().any(|&f| f >= limit) {
            return Err(invalid("flip mask wider than the arity"));
        }
        self.negations = Some(flips);
        Ok(self)
    }

    pub fn graph(&self) -> &Hypergraph {
        &self.graph
    }

    pub fn predicate(&self) -> &Predicate {
        &self.predicate
    }

    pub fn bias(&self) -> Option<f64> {
        self.bias
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn arity(&self) -> usize {
        self.predicate.arity()
    }

    pub fn flip_masks(&self) -> Option<&[u32]> {
        self.negations.as_deref()
    }

    /// True when some edge carries a negated coordinate.
    pub fn has_negations(&self) -> bool {
        self.negations.as_ref().is_some_and(|f| f.iter().any(|&x| x != 0))
    }

    pub fn negation_patterns(&self) -> Option<Vec<Vec<i8>>> {
        let r = self.arity();
        self.negations.as_ref().map(|flips| {
            flips
                .iter()
                .map(|&f| (0..r).map(|j| if f >> (r - 1 - j) & 1 == 1 { -1 } else { 1 }).collect())
                .collect()
        })
    }

    pub fn with_predicate(&self, predicate: Predicate) -> Result<CspInstance> {
        let mut inst = CspInstance::new(self.graph.clone(), predicate, self.bias)?;
        inst.negations = self.negations.clone();
        Ok(inst)
    }

    pub fn with_bias(mut self, bias: Option<f64>) -> Self {
        self.bias = bias;
        self
    }

    /// Same instance with all negation patterns dropped.
    pub fn without_negations(&self) -> CspInstance {
        CspInstance { negations: None, ..self.clone() }
    }

    /// Whether edge `k` is satisfied by `sigma`.
    pub(crate) fn edge_satisfied(&self, k: usize, bits: &[bool]) -> bool {
        let e = &self.graph.edges()[k];
        let idx = e.iter().fold(0usize, |acc, &v| acc << 1 | bits[v] as usize);
        let flip = self.negations.as_ref().map_or(0, |f| f[k] as usize);
        self.predicate.accepts(idx ^ flip)
    }

    pub(crate) fn value_of(&self, sigma: &Labeling) -> f64 {
        let total = self.graph.total_edge_weight();
        if total <= 0.0 {
            return 0.0;
        }
        let bits = sigma.bits();
        let sat: f64 = (0..self.graph.edges().len())
            .filter(|&k| self.edge_satisfied(k, bits))
            .map(|k| self.graph.edge_weights()[k])
            .fold(0.0, |a, w| a + w);
        sat / total
    }
}

pub(crate) fn check_bias(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::InfeasibleBias(format!("bias {mu} outside (0, 1]")));
    }
    Ok(())
}

/// Value, relative weight and feasibility of one labeling.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueReport {
    pub value: f64,
    pub relative_weight: f64,
    pub feasible: bool,
}

/// `w(σ)/w(V)`.
pub fn relative_weight(sigma: &Labeling, h: &Hypergraph) -> Result<f64> {
    h.check_len(sigma)?;
    Ok(h.weight_of(sigma))
}

/// Weighted fraction of edges whose vertices are all labeled 1.
pub fn value_dksh(sigma: &Labeling, h: &Hypergraph) -> Result<f64> {
    h.check_len(sigma)?;
    Ok(h.value_of(sigma))
}

/// Weighted fraction of constraints satisfied, negations applied.
pub fn value_csp(sigma: &Labeling, inst: &CspInstance) -> Result<f64> {
    inst.graph.check_len(sigma)?;
    Ok(inst.value_of(sigma))
}

pub fn is_feasible(relative_weight: f64, mu: f64, mode: BiasMode) -> bool {
    match mode {
        BiasMode::AtMost => relative_weight <= mu + WEIGHT_TOL,
        BiasMode::Exactly => (relative_weight - mu).abs() <= WEIGHT_TOL,
    }
}

pub fn report_dksh(sigma: &Labeling, h: &Hypergraph, mu: f64, mode: BiasMode) -> Result<ValueReport> {
    let relative_weight = relative_weight(sigma, h)?;
    Ok(ValueReport { value: h.value_of(sigma), relative_weight, feasible: is_feasible(relative_weight, mu, mode) })
}

pub fn report_csp(sigma: &Labeling, inst: &CspInstance, mu: f64, mode: BiasMode) -> Result<ValueReport> {
    let relative_weight = relative_weight(sigma, inst.graph())?;
    Ok(ValueReport { value: inst.value_of(sigma), relative_weight, feasible: is_feasible(relative_weight, mu, mode) })
}
