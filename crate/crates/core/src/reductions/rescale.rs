//! Moving a labeling between bias `μ` and bias `ℓμ`.

use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::instance::{Labeling, WEIGHT_TOL};
use crate::reductions::dksh_to_pred::pad_ascending;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RescaleDirection {
    /// Grow a `μn`-set to `ℓμn` vertices by adding the lowest-index zeros.
    Pad,
    /// Shrink to a uniformly random `μn`-subset of the support.
    Subsample,
}

fn target(mu: f64, n: usize) -> usize {
    (mu * n as f64 + WEIGHT_TOL).floor() as usize
}

pub fn bias_rescale<R: Rng>(
    sigma: &Labeling,
    ell: f64,
    mu: f64,
    direction: RescaleDirection,
    rng: &mut R,
) -> Result<Labeling> {
    if ell.is_nan() || ell < 1.0 {
        return Err(invalid(format!("scale factor {ell} must be at least 1")));
    }
    if !(mu > 0.0 && ell * mu <= 1.0 + WEIGHT_TOL) {
        return Err(Error::InfeasibleBias(format!("need 0 < μ and ℓμ ≤ 1, got μ = {mu}, ℓ = {ell}")));
    }
    let n = sigma.len();
    match direction {
        RescaleDirection::Pad => {
            let k = target(ell * mu, n);
            if sigma.count_ones() > k {
                return Err(invalid(format!("labeling already has more than {k} ones")));
            }
            let mut out = sigma.clone();
            pad_ascending(&mut out, k);
            Ok(out)
        }
        RescaleDirection::Subsample => {
            let k = target(mu, n);
            let support = sigma.support();
            if support.len() < k {
                return Err(invalid(format!("labeling has {} ones, fewer than μn = {k}", support.len())));
            }
            let mut chosen: Vec<usize> = sample(rng, support.len(), k).into_iter().map(|i| support[i]).collect();
            chosen.sort_unstable();
            Ok(Labeling::from_support(n, &chosen))
        }
    }
}
