//! The μ-biased noisy hypercube test: `r` noisy copies of a biased point, accepted
//! with probability `∏ f(x_i)`.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::gadget::space::{correlated_copy, sample_correlated, FiniteSpace};
use crate::gadget::tabulated::TABLE_CAP;
use crate::gadget::{monte_carlo, Assignment, Estimate, GadgetParams, GadgetTest, HypercubeVariant};

/// Draw one hyperedge `(x_1, …, x_r)` of `t`-bit strings.
pub fn sample_noisy_hypercube_edge<R: Rng>(p: &GadgetParams, rng: &mut R) -> Result<Vec<Vec<bool>>> {
    let (r, t, rho) = (p.r, p.t, p.rho());
    let bit = FiniteSpace::biased_bit(p.mu)?;
    let mut copies = vec![vec![false; t]; r];
    for j in 0..t {
        match p.variant {
            HypercubeVariant::IndependentCopies => {
                let center = bit.sample(rng);
                for c in copies.iter_mut() {
                    c[j] = correlated_copy(&bit, center, rho, rng) == 1;
                }
            }
            HypercubeVariant::SharedTheta => {
                let col = sample_correlated(&bit, r, rho * rho, rng)?;
                for (c, v) in copies.iter_mut().zip(col) {
                    c[j] = v == 1;
                }
            }
        }
    }
    Ok(copies)
}

/// Law of one coordinate across the `r` copies; bit `i` of the index is copy `i`.
fn coordinate_law(p: &GadgetParams) -> Vec<f64> {
    let (r, mu, rho) = (p.r, p.mu, p.rho());
    let pb = |b: bool| if b { mu } else { 1.0 - mu };
    (0..1usize << r)
        .map(|o| {
            let bits: Vec<bool> = (0..r).map(|i| o >> i & 1 == 1).collect();
            let indep: f64 = bits.iter().map(|&b| pb(b)).product();
            match p.variant {
                HypercubeVariant::SharedTheta => {
                    let shared = if bits.iter().all(|&b| b == bits[0]) { pb(bits[0]) } else { 0.0 };
                    rho * rho * shared + (1.0 - rho * rho) * indep
                }
                HypercubeVariant::IndependentCopies => [false, true]
                    .iter()
                    .map(|&x| pb(x) * bits.iter().map(|&b| rho * f64::from(u8::from(b == x)) + (1.0 - rho) * pb(b)).product::<f64>())
                    .sum(),
            }
        })
        .collect()
}

fn check_assignment(p: &GadgetParams, a: &Assignment) -> Result<()> {
    match a {
        Assignment::Dictator => Ok(()),
        Assignment::Constant(v) if (0.0..=1.0).contains(v) => Ok(()),
        Assignment::Constant(v) => Err(invalid(format!("constant {v} outside [0, 1]"))),
        Assignment::Table(f) => {
            if f.dims() != p.t || f.spaces().iter().any(|s| s.size() != 2) {
                return Err(invalid(format!("table must be defined on {{0,1}}^{}", p.t)));
            }
            if f.values().iter().any(|v| !(0.0..=1.0).contains(v)) {
                return Err(invalid("table values must lie in [0, 1]"));
            }
            Ok(())
        }
        Assignment::LongCodes(_) => Err(invalid("long codes are not an assignment for the hypercube test")),
    }
}

fn eval(a: &Assignment, x: &[bool]) -> f64 {
    match a {
        Assignment::Dictator => f64::from(u8::from(x[0])),
        Assignment::Constant(v) => *v,
        Assignment::Table(f) => f.eval(&x.iter().map(|&b| usize::from(b)).collect::<Vec<_>>()),
        Assignment::LongCodes(_) => unreachable!("rejected by check_assignment"),
    }
}

/// Exact dictator acceptance.
pub fn dictator_exact(p: &GadgetParams) -> f64 {
    let (r, mu, rho) = (p.r as i32, p.mu, p.rho());
    match p.variant {
        HypercubeVariant::SharedTheta => rho * rho * mu + (1.0 - rho * rho) * mu.powi(r),
        HypercubeVariant::IndependentCopies => {
            mu * (rho + (1.0 - rho) * mu).powi(r) + (1.0 - mu) * ((1.0 - rho) * mu).powi(r)
        }
    }
}

/// Lower bound on dictator acceptance from keeping the planted coordinate in every copy.
pub fn dictator_bound(p: &GadgetParams) -> f64 {
    match p.variant {
        HypercubeVariant::SharedTheta => p.mu * p.rho() * p.rho(),
        HypercubeVariant::IndependentCopies => p.mu * p.rho().powi(p.r as i32),
    }
}

/// `E[∏ f(x_i)]` by summing over every joint outcome; needs `2^{rt}` within the cap.
pub fn exact_acceptance(p: &GadgetParams, a: &Assignment) -> Result<f64> {
    check_assignment(p, a)?;
    let bits = p.r * p.t;
    if bits > TABLE_CAP.trailing_zeros() as usize {
        return Err(Error::CapExceeded {
            what: "hypercube outcomes".into(),
            needed: 1u64.checked_shl(bits as u32).unwrap_or(u64::MAX),
            cap: TABLE_CAP as u64,
        });
    }
    let law = coordinate_law(p);
    let mask = (1usize << p.r) - 1;
    let mut total = 0.0;
    let mut x = vec![vec![false; p.t]; p.r];
    for idx in 0..1usize << bits {
        let mut prob = 1.0;
        for j in 0..p.t {
            let o = idx >> (p.r * j) & mask;
            prob *= law[o];
            for (i, xi) in x.iter_mut().enumerate() {
                xi[j] = o >> i & 1 == 1;
            }
        }
        if prob > 0.0 {
            total += prob * x.iter().map(|xi| eval(a, xi)).product::<f64>();
        }
    }
    Ok(total)
}

/// Monte Carlo acceptance with the exact value attached when it is cheap.
pub fn hypercube_acceptance(params: &GadgetParams, a: &Assignment) -> Result<Estimate> {
    let p = params.resolve(GadgetTest::Hypercube)?;
    check_assignment(&p, a)?;
    let mut est = monte_carlo(p.samples, p.seed, |rng| {
        let edge = sample_noisy_hypercube_edge(&p, rng).expect("parameters validated");
        edge.iter().map(|x| eval(a, x)).product()
    });
    est.exact = match a {
        Assignment::Dictator => Some(dictator_exact(&p)),
        Assignment::Constant(v) => Some(v.powi(p.r as i32)),
        _ => exact_acceptance(&p, a).ok(),
    };
    if matches!(a, Assignment::Dictator) {
        est.analytic_bound = Some(dictator_bound(&p));
    }
    Ok(est)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadget::TabulatedFunction;
    use crate::seed::rng_for;

    fn params(variant: HypercubeVariant) -> GadgetParams {
        GadgetParams { mu: 0.1, rho: Some(0.5), r: 2, t: 3, variant, samples: 200_000, ..Default::default() }
            .resolve(GadgetTest::Hypercube)
            .unwrap()
    }

    #[test]
    fn shared_theta_dictator_value() {
        let p = params(HypercubeVariant::SharedTheta);
        assert!((dictator_exact(&p) - 0.0325).abs() < 1e-15);
        assert!((exact_acceptance(&p, &Assignment::Dictator).unwrap() - 0.0325).abs() < 1e-12);
    }

    #[test]
    fn independent_copies_dictator_value() {
        let p = params(HypercubeVariant::IndependentCopies);
        let closed = dictator_exact(&p);
        assert!((exact_acceptance(&p, &Assignment::Dictator).unwrap() - closed).abs() < 1e-12);
        assert!(closed >= dictator_bound(&p));
    }

    #[test]
    fn law_is_a_distribution_with_biased_marginals() {
        for v in [HypercubeVariant::SharedTheta, HypercubeVariant::IndependentCopies] {
            let p = GadgetParams { r: 3, rho: Some(0.7), mu: 0.3, variant: v, ..Default::default() };
            let law = coordinate_law(&p);
            assert!((law.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            for i in 0..3 {
                let m: f64 = law.iter().enumerate().filter(|(o, _)| o >> i & 1 == 1).map(|(_, q)| q).sum();
                assert!((m - 0.3).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_one_accepts_always() {
        let p = params(HypercubeVariant::SharedTheta);
        let e = hypercube_acceptance(&p, &Assignment::Constant(1.0)).unwrap();
        assert_eq!((e.estimate, e.stderr, e.exact), (1.0, 0.0, Some(1.0)));
    }

    #[test]
    fn monte_carlo_matches_exact_for_a_table() {
        let p = params(HypercubeVariant::IndependentCopies);
        let f = TabulatedFunction::on_biased_cube(0.1, 3, (0..8).map(|i| f64::from((i as u32).count_ones()) / 3.0).collect())
            .unwrap();
        let a = Assignment::Table(f);
        let e = hypercube_acceptance(&p, &a).unwrap();
        assert!(e.sigmas_from(e.exact.unwrap()) < 4.0);
    }

    #[test]
    fn sampler_marginals() {
        let p = params(HypercubeVariant::SharedTheta);
        let mut rng = rng_for(9, &[]);
        let n = 100_000;
        let ones: usize = (0..n).map(|_| usize::from(sample_noisy_hypercube_edge(&p, &mut rng).unwrap()[1][2])).sum();
        let freq = ones as f64 / n as f64;
        assert!((freq - 0.1).abs() < 4.0 * (0.09f64 / n as f64).sqrt());
    }

    #[test]
    fn rejects_wrong_table_shape() {
        let p = params(HypercubeVariant::SharedTheta);
        let f = TabulatedFunction::on_biased_cube(0.1, 2, vec![0.0; 4]).unwrap();
        assert!(hypercube_acceptance(&p, &Assignment::Table(f)).is_err());
    }
}
