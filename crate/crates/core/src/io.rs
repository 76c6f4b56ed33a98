//! JSON instance format shared by the CLI and tests.
//!
//! ```json
//! {"n": 4, "arity": 2, "edges": [[0,1],[1,2]], "edge_weights": [1, 2],
//!  "predicate": {"arity": 2, "accepting": ["11"]}, "bias": 0.5,
//!  "negations": [[1,-1],[1,1]]}
//! ```
//! Without `predicate` the file is a DkSH instance. With a symmetric predicate each
//! edge is sorted by vertex together with its negation signs, so equivalent inputs
//! serialize identically.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::instance::{check_bias, CspInstance, Hypergraph};
use crate::predicate::Predicate;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex_weights: Option<Vec<f64>>,
    pub arity: usize,
    pub edges: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edge_weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicate: Option<Predicate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negations: Option<Vec<Vec<i8>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Dksh { graph: Hypergraph, bias: Option<f64> },
    Csp(CspInstance),
}

impl Instance {
    pub fn bias(&self) -> Option<f64> {
        match self {
            Instance::Dksh { bias, .. } => *bias,
            Instance::Csp(c) => c.bias(),
        }
    }

    pub fn graph(&self) -> &Hypergraph {
        match self {
            Instance::Dksh { graph, .. } => graph,
            Instance::Csp(c) => c.graph(),
        }
    }
}

fn unit_or(ws: &[f64]) -> Option<Vec<f64>> {
    if ws.iter().all(|&w| w == 1.0) {
        None
    } else {
        Some(ws.to_vec())
    }
}

impl InstanceFile {
    pub fn from_graph(g: &Hypergraph, bias: Option<f64>) -> Self {
        InstanceFile {
            n: g.n(),
            vertex_weights: unit_or(g.vertex_weights()),
            arity: g.arity(),
            edges: g.edges().to_vec(),
            edge_weights: unit_or(g.edge_weights()),
            predicate: None,
            bias,
            negations: None,
        }
    }

    pub fn from_csp(c: &CspInstance) -> Self {
        InstanceFile {
            predicate: Some(c.predicate().clone()),
            negations: c.negation_patterns(),
            ..Self::from_graph(c.graph(), c.bias())
        }
    }

    pub fn from_instance(i: &Instance) -> Self {
        match i {
            Instance::Dksh { graph, bias } => Self::from_graph(graph, *bias),
            Instance::Csp(c) => Self::from_csp(c),
        }
    }

    pub fn into_instance(self) -> Result<Instance> {
        if let Some(mu) = self.bias {
            check_bias(mu)?;
        }
        let Some(pred) = self.predicate else {
            if self.negations.is_some() {
                return Err(invalid("negations need a predicate"));
            }
            let graph = Hypergraph::new(self.n, self.arity, self.vertex_weights, self.edges, self.edge_weights)?;
            return Ok(Instance::Dksh { graph, bias: self.bias });
        };
        let mut edges = self.edges;
        let mut negations = self.negations;
        if let Some(neg) = &negations {
            if neg.len() != edges.len() {
                return Err(invalid(format!("{} negation patterns for {} edges", neg.len(), edges.len())));
            }
        }
        if pred.is_symmetric() {
            for (k, e) in edges.iter_mut().enumerate() {
                let signs = negations.as_ref().map(|n| n[k].clone()).unwrap_or_else(|| vec![1; e.len()]);
                if signs.len() != e.len() {
                    return Err(invalid(format!("negation pattern {k} has length {}, edge has {}", signs.len(), e.len())));
                }
                let mut pairs: Vec<(usize, i8)> = e.iter().copied().zip(signs).collect();
                pairs.sort_unstable();
                *e = pairs.iter().map(|p| p.0).collect();
                if let Some(n) = negations.as_mut() {
                    n[k] = pairs.iter().map(|p| p.1).collect();
                }
            }
        }
        let graph = Hypergraph::new(self.n, self.arity, self.vertex_weights, edges, self.edge_weights)?;
        let mut csp = CspInstance::new(graph, pred, self.bias)?;
        if let Some(n) = negations.take() {
            csp = csp.with_negations(&n)?;
        }
        Ok(Instance::Csp(csp))
    }
}

pub fn parse_instance(json: &str) -> Result<Instance> {
    let file: InstanceFile = serde_json::from_str(json).map_err(|e| invalid(format!("malformed instance: {e}")))?;
    file.into_instance()
}

pub fn instance_to_json(i: &Instance) -> String {
    serde_json::to_string(&InstanceFile::from_instance(i)).expect("instance serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dksh_round_trip() {
        let src = r#"{"n":3,"arity":2,"edges":[[0,1],[1,2]],"edge_weights":[1.0,2.5],"bias":0.5}"#;
        let inst = parse_instance(src).unwrap();
        assert!(matches!(inst, Instance::Dksh { .. }));
        assert_eq!(instance_to_json(&inst), src);
        assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn symmetric_predicates_canonicalize() {
        let a = r#"{"n":3,"arity":2,"edges":[[2,0]],"predicate":{"arity":2,"accepting":["01","10"]},"negations":[[1,-1]]}"#;
        let b = r#"{"n":3,"arity":2,"edges":[[0,2]],"predicate":{"arity":2,"accepting":["10","01"]},"negations":[[-1,1]]}"#;
        assert_eq!(parse_instance(a).unwrap(), parse_instance(b).unwrap());
        // Single-string predicates are position sensitive and stay as given.
        let c = r#"{"n":3,"arity":2,"edges":[[2,0]],"predicate":{"arity":2,"accepting":["10"]}}"#;
        let Instance::Csp(csp) = parse_instance(c).unwrap() else { panic!() };
        assert_eq!(csp.graph().edges(), &[vec![2, 0]]);
    }

    #[test]
    fn malformed_inputs() {
        assert!(parse_instance("{").is_err());
        assert!(parse_instance(r#"{"n":2,"arity":2,"edges":[[0,5]]}"#).is_err());
        assert!(parse_instance(r#"{"n":2,"arity":2,"edges":[[0,1]],"bias":1.5}"#).is_err());
        assert!(parse_instance(r#"{"n":2,"arity":2,"edges":[[0,1]],"negations":[[1,1]]}"#).is_err());
        assert!(parse_instance(r#"{"n":2,"arity":2,"edges":[[0,1]],"extra":1}"#).is_err());
    }
}
