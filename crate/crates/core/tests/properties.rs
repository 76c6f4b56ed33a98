mod common;

use biascsp_core::gadget::{gamma2, FiniteSpace, TabulatedFunction};
use biascsp_core::instance::{relative_weight, value_dksh};
use biascsp_core::io::{instance_to_json, parse_instance, Instance};
use biascsp_core::oracle::brute_force_dksh;
use biascsp_core::reductions::cloud::cloud_expansion;
use biascsp_core::reductions::dksh_to_predicate;
use biascsp_core::oracle::brute_force_csp;
use biascsp_core::solvers::{solve_dksh_weighted, SolverConfig};
use biascsp_core::{BiasMode, Hypergraph, Labeling, Predicate};
use proptest::prelude::*;

fn hypergraph(max_n: usize, arity: usize) -> impl Strategy<Value = Hypergraph> {
    (arity.max(1)..=max_n)
        .prop_flat_map(move |n| {
            let edge = proptest::sample::subsequence((0..n).collect::<Vec<_>>(), arity);
            (
                Just(n),
                proptest::collection::vec(0.1f64..3.0, n),
                proptest::collection::vec((edge, 0.1f64..3.0), 1..8),
            )
        })
        .prop_map(move |(n, w, es)| {
            let (edges, ew): (Vec<_>, Vec<_>) = es.into_iter().unzip();
            Hypergraph::new(n, arity, Some(w), edges, Some(ew)).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn minimal_strings_match_containment(r in 1usize..=4, code in any::<u16>()) {
        let table: Vec<bool> = (0..1 << r).map(|x| code >> x & 1 == 1).collect();
        let p = Predicate::from_table(r, table).unwrap();
        let minimal = p.minimal_elements();
        prop_assert_eq!(&minimal, &common::minimal_by_containment(&p.accepting()));
        for x in p.accepting() {
            prop_assert!(minimal.iter().any(|&m| m & x == m));
        }
    }

    #[test]
    fn values_are_normalized(h in hypergraph(7, 2), bits in any::<u8>()) {
        let sigma = Labeling::from_mask(h.n(), u64::from(bits) & ((1 << h.n()) - 1));
        let v = value_dksh(&sigma, &h).unwrap();
        let w = relative_weight(&sigma, &h).unwrap();
        prop_assert!((0.0..=1.0).contains(&v) && (0.0..=1.0 + 1e-12).contains(&w));
        prop_assert!((value_dksh(&Labeling::ones(h.n()), &h).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cloud_value_is_product_of_marginals(h in hypergraph(4, 2), sizes in proptest::collection::vec(1usize..=3, 4), bits in any::<u16>()) {
        let sizes = &sizes[..h.n()];
        let cloud = cloud_expansion(&h, sizes).unwrap();
        let big = cloud.graph.n();
        let sigma = Labeling::from_mask(big, u64::from(bits) & ((1 << big) - 1));
        let m = cloud.marginals(&sigma);
        let expect: f64 = h.edges().iter().zip(h.edge_weights())
            .map(|(e, w)| w * e.iter().map(|&v| m[v]).product::<f64>())
            .sum::<f64>() / h.total_edge_weight();
        prop_assert!((value_dksh(&sigma, &cloud.graph).unwrap() - expect).abs() < 1e-9);
    }

    #[test]
    fn embedding_preserves_optimum(h in hypergraph(6, 2), k in 1usize..6) {
        let n = h.n();
        let unit = Hypergraph::uniform(n, 2, h.edges().to_vec()).unwrap();
        let mu = k.min(n - 1).max(1) as f64 / n as f64;
        let psi = Predicate::exactly(2, 3);
        let red = dksh_to_predicate(&unit, &psi, 0b110, mu).unwrap();
        let a = brute_force_csp(&red.instance, red.bias, BiasMode::AtMost).unwrap().value;
        let b = brute_force_dksh(&unit, mu, BiasMode::AtMost).unwrap().value;
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn weighted_solver_respects_slack(h in hypergraph(8, 3), mu in 0.15f64..0.6, seed in any::<u64>()) {
        let cfg = SolverConfig { seed, ..Default::default() };
        let res = solve_dksh_weighted(&h, mu, &cfg).unwrap();
        prop_assert!(res.relative_weight <= mu * (1.0 + cfg.eta) + 1e-9);
        prop_assert!((value_dksh(&res.labeling, &h).unwrap() - res.value).abs() < 1e-12);
    }

    #[test]
    fn noise_is_a_semigroup(vals in proptest::collection::vec(0.0f64..1.0, 8), a in 0.0f64..1.0, b in 0.0f64..1.0, mu in 0.1f64..0.9) {
        let f = TabulatedFunction::on_biased_cube(mu, 3, vals).unwrap();
        let ab = f.noise(a).unwrap().noise(b).unwrap();
        let direct = f.noise(a * b).unwrap();
        for (x, y) in ab.values().iter().zip(direct.values()) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        prop_assert!((direct.expectation() - f.expectation()).abs() < 1e-12);
        for i in 0..3 {
            prop_assert!(f.influence(i).unwrap() >= -1e-15);
        }
    }

    #[test]
    fn gamma_lies_between_frechet_bounds(rho in 0.0f64..0.99, m1 in 0.01f64..0.99, m2 in 0.01f64..0.99) {
        let g = gamma2(rho, m1, m2).unwrap();
        prop_assert!(g >= m1 * m2 - 1e-9 && g <= m1.min(m2) + 1e-9);
        prop_assert!((g - gamma2(rho, m2, m1).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn instance_json_round_trips(h in hypergraph(6, 2), mu in 0.05f64..1.0) {
        let inst = Instance::Dksh { graph: h, bias: Some(mu) };
        prop_assert_eq!(parse_instance(&instance_to_json(&inst)).unwrap(), inst);
    }

    #[test]
    fn finite_space_probabilities(ps in proptest::collection::vec(0.01f64..1.0, 1..6)) {
        let total: f64 = ps.iter().sum();
        let s = FiniteSpace::new(ps.iter().map(|p| p / total).collect()).unwrap();
        prop_assert!((s.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn sse_oracle_agrees_on_a_second_graph() {
    use biascsp_core::gadget::sse::{exact_dictator_acceptance, RegularGraph};
    use biascsp_core::gadget::GadgetParams;
    let (adj, planted) = common::two_cliques_adj(3);
    let (g, s) = RegularGraph::two_cliques(3).unwrap();
    let p = GadgetParams { mu: 0.2, rho: Some(0.3), beta: Some(0.5), eta: Some(0.2), r: 2, big_r: 3, ..Default::default() };
    let lib = exact_dictator_acceptance(&g, &s, &p).unwrap();
    let setup = common::SseSetup { adj: &adj, planted: &planted, mu: 0.2, beta: 0.5, rho: 0.3, eta: 0.2, r: 2, big_r: 3 };
    assert!((lib - common::sse_dictator_by_enumeration(&setup)).abs() < 1e-12);
}
