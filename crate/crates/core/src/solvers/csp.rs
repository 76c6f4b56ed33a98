//! Predicate CSP solvers built on the weighted DkSH solver.

use rand::Rng;

use crate::error::Result;
use crate::instance::{check_bias, CspInstance, Hypergraph, Labeling, WEIGHT_TOL};
use crate::predicate::Predicate;
use crate::reductions::truncate::predicate_to_dksh;
use crate::seed::{derive_seed, rng_for, TAG_GENERAL, TAG_NEGATIONS, TAG_SUBSAMPLE};
use crate::solvers::dksh::solve_dksh_weighted;
use crate::solvers::{first_argmax, SolveResult, SolverConfig, StageTrace};

/// Keep each 1 independently with probability 1/2.
pub fn subsample_half<R: Rng>(sigma: &Labeling, rng: &mut R) -> Labeling {
    Labeling::new(sigma.bits().iter().map(|&b| b && rng.gen_bool(0.5)).collect())
}

/// Predicate with a single accepting string: solve the DkSH instance on its
/// 1-coordinates, then thin the solution so the 0-coordinates get a chance to be 0.
/// The undiluted DkSH labeling is kept as one of the candidates.
pub fn solve_single_string(inst: &CspInstance, mu: f64, cfg: &SolverConfig) -> Result<SolveResult> {
    check_bias(mu)?;
    let h = predicate_to_dksh(inst)?;
    let first = solve_dksh_weighted(&h, mu, cfg)?;
    let reps = cfg.repetitions_for(mu, inst.arity());
    let mut candidates = vec![first.labeling.clone()];
    for j in 0..reps {
        candidates.push(subsample_half(&first.labeling, &mut rng_for(cfg.seed, &[TAG_SUBSAMPLE, j as u64])));
    }
    let values: Vec<f64> = candidates.iter().map(|c| inst.value_of(c)).collect();
    let best = first_argmax(values.iter().copied()).expect("non-empty");
    let labeling = candidates.swap_remove(best);
    let rel = inst.graph().weight_of(&labeling);
    let mut res = SolveResult::new(labeling, values[best], rel, mu, mu * (1.0 + cfg.eta));
    res.trace = first.trace;
    res.trace.push(StageTrace::new("subsample", values[best], rel).with_note(format!("reps={reps} pick={best}")));
    Ok(res)
}

/// Any predicate: run the single-string solver for every minimal accepting string and
/// keep the labeling that does best on the original predicate. Instances with
/// negated coordinates go through [`solve_with_negations`].
pub fn solve_general(inst: &CspInstance, mu: f64, cfg: &SolverConfig) -> Result<SolveResult> {
    check_bias(mu)?;
    if inst.has_negations() {
        return solve_with_negations(inst, mu, cfg);
    }
    let r = inst.arity();
    let minimal = inst.predicate().minimal_elements();
    if minimal.is_empty() {
        let z = Labeling::zeros(inst.n());
        let mut res = SolveResult::new(z, 0.0, 0.0, mu, mu * (1.0 + cfg.eta));
        res.trace.push(StageTrace::new("no-accepting-string", 0.0, 0.0));
        return Ok(res);
    }
    let plain = inst.without_negations();
    let mut runs = Vec::with_capacity(minimal.len());
    for &beta in &minimal {
        let sub = plain.with_predicate(Predicate::single(r, beta))?;
        runs.push(solve_single_string(&sub, mu, &cfg.with_seed(derive_seed(cfg.seed, &[TAG_GENERAL, beta as u64])))?);
    }
    let values: Vec<f64> = runs.iter().map(|s| inst.value_of(&s.labeling)).collect();
    let best = first_argmax(values.iter().copied()).expect("non-empty");
    let chosen = runs.swap_remove(best);
    let rel = chosen.relative_weight;
    let mut res = SolveResult::new(chosen.labeling, values[best], rel, mu, mu * (1.0 + cfg.eta));
    res.trace = chosen.trace;
    res.trace.push(
        StageTrace::new("minimal-string", values[best], rel).with_note(inst.predicate().bitstring(minimal[best])),
    );
    Ok(res)
}

/// Negated coordinates: group edges by negation pattern, solve each group with the
/// conjugated predicate, and keep the labeling that does best on the whole instance.
/// Above bias 1/2 the complementary problem is solved at bias `1-μ`; its labeling is
/// padded (lowest index first) to weight at least `1-μ` and then complemented.
pub fn solve_with_negations(inst: &CspInstance, mu: f64, cfg: &SolverConfig) -> Result<SolveResult> {
    check_bias(mu)?;
    let r = inst.arity();
    let n = inst.n();
    let flipped = mu > 0.5;
    let (psi, mu1) = if flipped { (inst.predicate().negated_inputs(), 1.0 - mu) } else { (inst.predicate().clone(), mu) };
    let g = inst.graph();
    let flips: Vec<u32> = inst.flip_masks().map_or_else(|| vec![0; g.edges().len()], <[u32]>::to_vec);

    let mut outputs = Vec::new();
    let mut patterns = Vec::new();
    for pattern in 0..1u32 << r {
        let members: Vec<usize> = (0..flips.len()).filter(|&k| flips[k] == pattern).collect();
        if members.is_empty() {
            continue;
        }
        let edges = members.iter().map(|&k| g.edges()[k].clone()).collect();
        let weights = members.iter().map(|&k| g.edge_weights()[k]).collect();
        let class_graph = Hypergraph::new(n, r, Some(g.vertex_weights().to_vec()), edges, Some(weights))?;
        let class = CspInstance::new(class_graph, psi.conjugate_by_flip(pattern as usize), None)?;
        let sub_cfg = cfg.with_seed(derive_seed(cfg.seed, &[TAG_NEGATIONS, pattern as u64]));
        let mut sigma = solve_general(&class, mu1, &sub_cfg)?.labeling;
        if flipped {
            // Need w(σ) ≥ 1-μ so the complement stays within μ.
            for v in 0..n {
                if g.weight_of(&sigma) >= mu1 - WEIGHT_TOL {
                    break;
                }
                sigma.set(v, true);
            }
            sigma = sigma.complement();
        }
        outputs.push(sigma);
        patterns.push(pattern);
    }
    if outputs.is_empty() {
        outputs.push(Labeling::zeros(n));
        patterns.push(0);
    }
    let values: Vec<f64> = outputs.iter().map(|s| inst.value_of(s)).collect();
    let best = first_argmax(values.iter().copied()).expect("non-empty");
    let labeling = outputs.swap_remove(best);
    let rel = g.weight_of(&labeling);
    let bound = if flipped { mu } else { mu * (1.0 + cfg.eta) };
    let mut res = SolveResult::new(labeling, values[best], rel, mu, bound);
    res.trace.push(
        StageTrace::new("negation-class", values[best], rel)
            .with_note(format!("pattern={} complemented={flipped}", crate::predicate::bitstring(patterns[best] as usize, r))),
    );
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{value_csp, BiasMode};
    use crate::oracle::brute_force_csp;

    #[test]
    fn subsample_only_removes_ones() {
        let s = Labeling::from_bitstring("1101001").unwrap();
        let mut rng = rng_for(1, &[]);
        for _ in 0..50 {
            let t = subsample_half(&s, &mut rng);
            assert!(t.support().iter().all(|&v| s.get(v)));
        }
    }

    fn triangle_csp(p: Predicate) -> CspInstance {
        let g = Hypergraph::uniform(4, 2, vec![vec![0, 1], vec![1, 2], vec![0, 2], vec![2, 3]]).unwrap();
        CspInstance::new(g, p, None).unwrap()
    }

    #[test]
    fn single_string_all_ones_matches_dksh() {
        let inst = triangle_csp(Predicate::and(2));
        let res = solve_single_string(&inst, 0.5, &SolverConfig::default()).unwrap();
        let opt = brute_force_csp(&inst, 0.5, BiasMode::AtMost).unwrap();
        assert!((res.value - opt.value).abs() < 1e-12);
    }

    #[test]
    fn general_on_neq_is_bias_independent() {
        let inst = triangle_csp(Predicate::neq());
        let res = solve_general(&inst, 0.25, &SolverConfig::default()).unwrap();
        assert!(res.value > 0.0);
        assert!(res.relative_weight <= 0.25 * 1.5 + 1e-9);
    }

    #[test]
    fn constant_false_gives_zero() {
        let inst = triangle_csp(Predicate::constant_false(2));
        let res = solve_general(&inst, 0.5, &SolverConfig::default()).unwrap();
        assert_eq!(res.value, 0.0);
        assert_eq!(res.labeling.count_ones(), 0);
    }

    #[test]
    fn all_positive_patterns_equal_general() {
        let inst = triangle_csp(Predicate::or(2));
        let with = inst.clone().with_negations(&vec![vec![1, 1]; 4]).unwrap();
        let cfg = SolverConfig { seed: 5, ..Default::default() };
        let a = solve_general(&inst, 0.5, &cfg).unwrap();
        let b = solve_with_negations(&with, 0.5, &cfg).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn high_bias_uses_complement() {
        let inst = triangle_csp(Predicate::and(2));
        let res = solve_with_negations(&inst, 0.75, &SolverConfig::default()).unwrap();
        assert!(res.relative_weight <= 0.75 + 1e-9);
        assert_eq!(res.value, value_csp(&res.labeling, &inst).unwrap());
        let opt = brute_force_csp(&inst, 0.75, BiasMode::AtMost).unwrap();
        assert!(res.value <= opt.value + 1e-12);
        assert!(res.trace.last().unwrap().note.as_deref().unwrap().contains("complemented=true"));
    }
}
