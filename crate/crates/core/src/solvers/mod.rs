//! Approximation algorithms for biased DkS, DkSH and predicate CSPs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::Labeling;

pub mod csp;
pub mod dks;
pub mod dksh;
pub mod greedy;

pub use csp::{solve_general, solve_single_string, solve_with_negations, subsample_half};
pub use dks::solve_dks;
pub use dksh::{round_dense_set, solve_dksh_bounded, solve_dksh_unweighted, solve_dksh_weighted};
pub use greedy::greedy_dksh1;

/// Upper limit on repetitions of any randomized stage.
pub const MAX_REPETITIONS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DksBackend {
    /// Exhaustive search over all k-subsets.
    Exact,
    /// Repeatedly drop a vertex of least weighted degree.
    GreedyPeel,
    /// Random-partition Max-2-CSP, solved exhaustively when small and by local search otherwise.
    Via2Csp,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub seed: u64,
    /// Weight slack: outputs have relative weight at most `μ(1+η)`.
    pub eta: f64,
    /// Repetitions of each randomized stage; `None` means `⌈(1/μ)^r⌉` capped at 10⁴.
    pub repetitions: Option<usize>,
    pub backend: DksBackend,
    /// Vertices heavier than `μ^heavy_exponent` are enumerated exhaustively.
    pub heavy_exponent: f64,
    /// Refuse to enumerate more heavy vertices than this.
    pub heavy_cap: usize,
    /// Accepted relative deviation of a rounded set's size from `μn`.
    pub size_band: f64,
    /// Target total cloud size when a weighted instance is expanded internally.
    pub cloud_budget: usize,
    /// Probability of copying the dense-set indicator during rounding; `None` means `2/r`.
    pub rounding_alpha: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            eta: 0.5,
            repetitions: None,
            backend: DksBackend::GreedyPeel,
            heavy_exponent: 10.0,
            heavy_cap: 20,
            size_band: 0.2,
            cloud_budget: 48,
            rounding_alpha: None,
        }
    }
}

impl SolverConfig {
    pub fn with_seed(&self, seed: u64) -> SolverConfig {
        SolverConfig { seed, ..self.clone() }
    }

    pub fn repetitions_for(&self, mu: f64, r: usize) -> usize {
        self.repetitions.unwrap_or_else(|| default_repetitions(mu, r)).clamp(1, MAX_REPETITIONS)
    }

    pub(crate) fn check_eta(&self, mu: f64) -> Result<()> {
        if !(self.eta > mu * mu && self.eta < 1.0) {
            return Err(Error::Precondition(format!("η = {} must lie in (μ², 1) = ({}, 1)", self.eta, mu * mu)));
        }
        Ok(())
    }
}

/// `⌈(1/μ)^r⌉`, capped.
pub fn default_repetitions(mu: f64, r: usize) -> usize {
    let reps = (1.0 / mu).powi(r as i32).ceil();
    if reps.is_finite() && reps < MAX_REPETITIONS as f64 {
        (reps as usize).max(1)
    } else {
        MAX_REPETITIONS
    }
}

/// One stage of a solver run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageTrace {
    pub stage: String,
    pub value: f64,
    pub relative_weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl StageTrace {
    pub(crate) fn new(stage: &str, value: f64, relative_weight: f64) -> Self {
        StageTrace { stage: stage.to_string(), value, relative_weight, note: None }
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub labeling: Labeling,
    pub value: f64,
    pub relative_weight: f64,
    /// The weight the output is guaranteed not to exceed.
    pub weight_bound: f64,
    /// `relative_weight / μ - 1`: how much of the slack above `μ` was used.
    pub slack_used: f64,
    pub trace: Vec<StageTrace>,
}

impl SolveResult {
    pub(crate) fn new(labeling: Labeling, value: f64, relative_weight: f64, mu: f64, weight_bound: f64) -> Self {
        SolveResult { labeling, value, relative_weight, weight_bound, slack_used: relative_weight / mu - 1.0, trace: Vec::new() }
    }
}

/// Index of the first maximum; NaN never wins.
pub(crate) fn first_argmax(values: impl IntoIterator<Item = f64>) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, v) in values.into_iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b + 1e-12) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn repetitions_default_and_cap() {
        assert_eq!(default_repetitions(0.5, 2), 4);
        assert_eq!(default_repetitions(0.3, 2), 12);
        assert_eq!(default_repetitions(0.01, 3), MAX_REPETITIONS);
        let cfg = SolverConfig { repetitions: Some(0), ..Default::default() };
        assert_eq!(cfg.repetitions_for(0.5, 2), 1);
    }

    #[test]
    fn argmax_takes_first() {
        assert_eq!(first_argmax([0.1, 0.3, 0.3, 0.2]), Some(1));
        assert_eq!(first_argmax(Vec::<f64>::new()), None);
    }

    #[test]
    fn eta_range() {
        let cfg = SolverConfig { eta: 0.2, ..Default::default() };
        assert!(cfg.check_eta(0.4).is_ok());
        assert!(cfg.check_eta(0.5).is_err());
    }
}
