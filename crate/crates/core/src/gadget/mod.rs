//! Samplers for the noise-test gadgets and acceptance estimates for explicit
//! assignments, plus the numeric tools their analysis uses (influence, noise,
//! Gaussian stability).

pub mod gaussian;
pub mod hypercube;
pub mod space;
pub mod sse;
pub mod tabulated;
pub mod ug;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::seed::{rng_for, Rng, TAG_GADGET};

pub use gaussian::{gamma2, gaussian_stability, normal_cdf, normal_quantile};
pub use space::{correlated_copy, sample_correlated, FiniteSpace};
pub use tabulated::TabulatedFunction;

/// Samples per Monte Carlo batch. Each batch draws from its own seed stream.
pub const MC_BATCH: u64 = 4096;

/// Default for the unspecified stability constant in the ρ formulas.
pub const DEFAULT_C_PRIME: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum HypercubeVariant {
    /// Each copy keeps each coordinate independently with probability ρ.
    IndependentCopies,
    /// Per coordinate, all copies keep the center with probability ρ², else all resample.
    #[default]
    SharedTheta,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GadgetTest {
    Hypercube,
    Sse,
    Ug,
}

/// Parameter block for the gadget samplers. Unset fields are filled by
/// [`GadgetParams::resolve`] with the default formulas for the chosen test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GadgetParams {
    pub mu: f64,
    pub rho: Option<f64>,
    /// Constant in the ρ formulas; only used when `rho` is unset.
    pub c_prime: f64,
    /// Constant in `β = μ^{C r}`; only used when `beta` is unset.
    pub c: f64,
    pub beta: Option<f64>,
    pub eta: Option<f64>,
    /// Arity of the test (number of queries).
    pub r: usize,
    /// Coordinates per query in the SSE test.
    #[serde(rename = "R")]
    pub big_r: usize,
    /// Hypercube dimension, and label count (long-code dimension) for the UG test.
    pub t: usize,
    /// Alphabet size of the UG long codes.
    pub label_size: usize,
    pub samples: u64,
    pub seed: u64,
    pub variant: HypercubeVariant,
    /// How ρ was obtained; filled in on resolve.
    pub rho_source: Option<String>,
    /// Quantities that only enter the analysis; recorded, never used by the samplers.
    pub diagnostics: BTreeMap<String, f64>,
}

impl Default for GadgetParams {
    fn default() -> Self {
        GadgetParams {
            mu: 0.1,
            rho: None,
            c_prime: DEFAULT_C_PRIME,
            c: 1.0,
            beta: None,
            eta: None,
            r: 2,
            big_r: 4,
            t: 4,
            label_size: 4,
            samples: 100_000,
            seed: 0,
            variant: HypercubeVariant::default(),
            rho_source: None,
            diagnostics: BTreeMap::new(),
        }
    }
}

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {v} must lie in (0, 1)")))
    }
}

fn check_closed_unit(name: &str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(invalid(format!("{name} = {v} must lie in [0, 1]")))
    }
}

impl GadgetParams {
    /// Materialize every default for `test` and validate.
    pub fn resolve(&self, test: GadgetTest) -> Result<GadgetParams> {
        let mut p = self.clone();
        check_open_unit("mu", p.mu)?;
        if p.r == 0 || p.samples == 0 {
            return Err(invalid("r and samples must be at least 1"));
        }
        if p.c_prime <= 0.0 || p.c <= 0.0 {
            return Err(invalid("constants c and c_prime must be positive"));
        }
        let r = p.r as f64;
        let log_inv_mu = (1.0 / p.mu).ln();
        if p.rho.is_some() {
            p.rho_source.get_or_insert_with(|| "given".into());
        } else {
            let (rho, src) = match test {
                GadgetTest::Hypercube => ((r * r * log_inv_mu).sqrt().recip(), "1/sqrt(r^2 ln(1/mu))"),
                GadgetTest::Sse => ((2.0 * p.c_prime * r * r * log_inv_mu).recip(), "1/(2 c' r^2 ln(1/mu))"),
                GadgetTest::Ug => {
                    if p.label_size < 2 {
                        return Err(invalid("label_size must be at least 2"));
                    }
                    ((p.c_prime * r * r * (p.label_size as f64).ln()).recip(), "1/(c' k^2 ln R)")
                }
            };
            p.rho = Some(rho.min(1.0));
            p.rho_source = Some(src.into());
        }
        let rho = p.rho.unwrap_or_default();
        check_closed_unit("rho", rho)?;
        match test {
            GadgetTest::Hypercube => {
                if p.t == 0 {
                    return Err(invalid("t must be at least 1"));
                }
            }
            GadgetTest::Sse => {
                let beta = *p.beta.get_or_insert(p.mu.powf(p.c * r));
                check_open_unit("beta", beta)?;
                let eta = *p.eta.get_or_insert(beta * beta / r);
                check_closed_unit("eta", eta)?;
                if p.big_r == 0 {
                    return Err(invalid("R must be at least 1"));
                }
                let nu = (rho * rho * p.mu * (-p.c * r).exp()).min(p.c * p.mu.powf(r)) / 10.0;
                p.diagnostics.insert("nu".into(), nu);
                p.diagnostics.insert("alpha".into(), rho * p.mu.powf(r));
            }
            GadgetTest::Ug => {
                let k = r;
                let big = p.label_size as f64;
                let eta = *p.eta.get_or_insert(1.0 / (k * k * big));
                check_closed_unit("eta", eta)?;
                if p.t == 0 || p.label_size < 2 {
                    return Err(invalid("UG test needs t >= 1 and label_size >= 2"));
                }
                p.diagnostics.insert("nu".into(), big.powf(-2.0 * k));
                p.diagnostics.insert("alpha".into(), rho * big.powf(-k));
            }
        }
        Ok(p)
    }

    pub(crate) fn rho(&self) -> f64 {
        self.rho.unwrap_or_default()
    }

    pub(crate) fn eta(&self) -> f64 {
        self.eta.unwrap_or_default()
    }

    pub(crate) fn beta(&self) -> f64 {
        self.beta.unwrap_or_default()
    }
}

/// What answers the test's queries.
#[derive(Clone, Debug, PartialEq)]
pub enum Assignment {
    /// The honest encoding: a dictator on the planted coordinate.
    Dictator,
    /// Same value everywhere (an acceptance probability in `[0, 1]`, or a label for UG).
    Constant(f64),
    /// Explicit function on the query domain.
    Table(TabulatedFunction),
    /// Per-vertex long codes `[R]^t → [R]` for the UG test.
    LongCodes(Vec<Vec<usize>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub estimate: f64,
    pub stderr: f64,
    pub samples: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub analytic_bound: Option<f64>,
}

impl Estimate {
    /// `|estimate − x|` in units of the standard error (infinite if the error is zero
    /// and the values differ).
    pub fn sigmas_from(&self, x: f64) -> f64 {
        let d = (self.estimate - x).abs();
        if d <= 1e-15 {
            0.0
        } else if self.stderr == 0.0 {
            f64::INFINITY
        } else {
            d / self.stderr
        }
    }
}

#[derive(Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0 {
            return o;
        }
        if o.n == 0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments {
            n,
            mean: self.mean + d * o.n as f64 / n as f64,
            m2: self.m2 + o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64,
        }
    }
}

/// Mean and standard error of `draw` over `samples` draws. Batches run in parallel on
/// disjoint seed streams and are merged in batch order, so the result does not depend
/// on the thread count.
pub fn monte_carlo<F>(samples: u64, seed: u64, draw: F) -> Estimate
where
    F: Fn(&mut Rng) -> f64 + Sync,
{
    let batches = samples.div_ceil(MC_BATCH);
    let parts: Vec<Moments> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_for(seed, &[TAG_GADGET, b]);
            let count = MC_BATCH.min(samples - b * MC_BATCH);
            let mut m = Moments::default();
            for _ in 0..count {
                m.push(draw(&mut rng));
            }
            m
        })
        .collect();
    let m = parts.into_iter().fold(Moments::default(), Moments::merge);
    let var = if m.n > 1 { (m.m2 / (m.n - 1) as f64).max(0.0) } else { 0.0 };
    Estimate { estimate: m.mean, stderr: (var / m.n as f64).sqrt(), samples: m.n, exact: None, analytic_bound: None }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng as _;

    #[test]
    fn constant_draw_has_zero_error() {
        let e = monte_carlo(10_000, 3, |_| 1.0);
        assert_eq!(e.estimate, 1.0);
        assert_eq!(e.stderr, 0.0);
        assert_eq!(e.samples, 10_000);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| monte_carlo(50_000, 11, |rng| rng.gen::<f64>()))
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn bernoulli_mean_within_error() {
        let e = monte_carlo(200_000, 1, |rng| if rng.gen_bool(0.3) { 1.0 } else { 0.0 });
        assert!(e.sigmas_from(0.3) < 4.0);
        assert!((e.stderr - (0.21f64 / 200_000.0).sqrt()).abs() < 1e-5);
    }

    #[test]
    fn resolve_fills_defaults() {
        let p = GadgetParams::default().resolve(GadgetTest::Sse).unwrap();
        let rho = p.rho.unwrap();
        assert!((rho - 1.0 / (2.0 * 2.0 * 4.0 * 10f64.ln())).abs() < 1e-15);
        assert!((p.beta.unwrap() - 0.01).abs() < 1e-15);
        assert!((p.eta.unwrap() - 0.00005).abs() < 1e-15);
        assert!(p.diagnostics.contains_key("nu"));
        let bad = GadgetParams { mu: 1.0, ..Default::default() };
        assert!(bad.resolve(GadgetTest::Hypercube).is_err());
        let given = GadgetParams { rho: Some(0.5), ..Default::default() }.resolve(GadgetTest::Ug).unwrap();
        assert_eq!(given.rho_source.as_deref(), Some("given"));
    }
}
