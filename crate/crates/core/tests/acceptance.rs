//! Acceptance suite: one line per criterion, non-zero exit if any fails.

mod common;

use std::time::Instant;

use biascsp_core::gadget::hypercube::hypercube_acceptance;
use biascsp_core::gadget::sse::{exact_dictator_acceptance, RegularGraph};
use biascsp_core::gadget::{Assignment, GadgetParams, HypercubeVariant};
use biascsp_core::verify::{run_claim, SuiteReport, VerifyConfig};
use biascsp_core::Predicate;
use common::{minimal_by_containment, shared_theta_dictator, sse_dictator_by_enumeration, two_cliques_adj, SseSetup};

type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

struct Outcome {
    pass: bool,
    detail: String,
}

fn suite(claim: &str, scale: f64, n_max: usize) -> (SuiteReport, f64) {
    let t = Instant::now();
    let cfg = VerifyConfig { n_max, seed: 0, scale };
    let rep = run_claim(claim, &cfg).expect("suite runs");
    (rep, t.elapsed().as_secs_f64())
}

fn from_suite(rep: &SuiteReport, secs: f64, extra: &str) -> Outcome {
    let mut detail = format!("{}/{} checks", rep.passed, rep.cases);
    for (k, v) in &rep.metrics {
        detail += &format!(", {k}={v:.4}");
    }
    detail += &format!(", {secs:.1}s{extra}");
    if let Some(f) = rep.failures.first() {
        detail += &format!("; first failure: {f}");
    }
    Outcome { pass: rep.ok(), detail }
}

fn ac1() -> Outcome {
    let t = Instant::now();
    let mut bad = Vec::new();
    let mut count = 0;
    for r in 1..=3usize {
        for code in 0u32..1 << (1 << r) {
            let table: Vec<bool> = (0..1 << r).map(|x| code >> x & 1 == 1).collect();
            let p = Predicate::from_table(r, table).unwrap();
            let accepting: Vec<usize> = (0..1 << r).filter(|&x| code >> x & 1 == 1).collect();
            let oracle = minimal_by_containment(&accepting);
            let independent = oracle.iter().all(|x| x.count_ones() <= 1);
            let prof = p.classify();
            if p.minimal_elements() != oracle || prof.bias_independent != independent {
                bad.push(format!("r={r} table={code:b}"));
            }
            count += 1;
        }
    }
    let (rep, _) = suite("minimal-set", 1.0, 8);
    let secs = t.elapsed().as_secs_f64();
    Outcome {
        pass: bad.is_empty() && rep.ok() && secs < 5.0,
        detail: format!("{count} predicates, {} mismatches, library suite {}/{}, {secs:.2}s", bad.len(), rep.passed, rep.cases),
    }
}

fn ac9() -> Outcome {
    let (rep, secs) = suite("gadget-completeness", 5.0, 8);
    let mut notes = String::new();
    let mut pass = rep.ok();

    // Closed form and the sampler's exact value must agree independently of Monte Carlo.
    let hp = GadgetParams {
        mu: 0.1,
        rho: Some(0.5),
        r: 2,
        t: 4,
        samples: 1,
        variant: HypercubeVariant::SharedTheta,
        ..Default::default()
    };
    let exact = hypercube_acceptance(&hp, &Assignment::Dictator).unwrap().exact.unwrap();
    let closed = shared_theta_dictator(0.1, 0.5, 2);
    pass &= (exact - closed).abs() < 1e-15;
    notes += &format!(", hypercube closed form {closed}");

    // SSE: library enumeration vs a walk over every sampler choice.
    let (adj, planted) = two_cliques_adj(2);
    let (g, s) = RegularGraph::two_cliques(2).unwrap();
    assert_eq!(planted, s);
    let sp = GadgetParams { mu: 0.3, rho: Some(0.6), beta: Some(0.4), eta: Some(0.1), r: 2, big_r: 4, ..Default::default() };
    let lib = exact_dictator_acceptance(&g, &s, &sp).unwrap();
    let setup = SseSetup { adj: &adj, planted: &planted, mu: 0.3, beta: 0.4, rho: 0.6, eta: 0.1, r: 2, big_r: 4 };
    let raw = sse_dictator_by_enumeration(&setup);
    pass &= (lib - raw).abs() < 1e-12;
    notes += &format!(", sse exact {lib:.10} vs raw enumeration {raw:.10}");
    let mut o = from_suite(&rep, secs, &notes);
    o.pass = pass;
    o
}

fn ac8() -> Outcome {
    let (rep, secs) = suite("weighted", 200.0 / 60.0, 10);
    let mut o = from_suite(&rep, secs, "");
    o.pass &= secs < 120.0;
    o
}

fn ac11() -> Outcome {
    let (rep, secs) = suite("determinism", 1.0, 8);
    // Whole suite reports must also match byte for byte across pools.
    let mut outputs = Vec::new();
    for threads in [1, 4] {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        for _ in 0..3 {
            let out = pool.install(|| {
                let cfg = VerifyConfig { n_max: 6, seed: 7, scale: 0.2 };
                let reps: Vec<SuiteReport> =
                    ["cl-alg-1b", "weighted", "gadget-completeness"].iter().map(|c| run_claim(c, &cfg).unwrap()).collect();
                serde_json::to_string(&reps).unwrap()
            });
            outputs.push(out);
        }
    }
    let same = outputs.iter().all(|o| *o == outputs[0]);
    let mut o = from_suite(&rep, secs, &format!(", suite reports identical across pools {{1,4}} x 3: {same}"));
    o.pass &= same;
    o
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("AC1 minimal accepting strings vs containment oracle", Box::new(ac1)),
        ("AC2 reduction optimum equalities", Box::new(|| {
            let (r, s) = suite("cl-red", 2.0, 8);
            from_suite(&r, s, "")
        })),
        ("AC3 subsampling hit probability", Box::new(|| {
            let (r, s) = suite("cl-alg-1b", 5.0, 8);
            from_suite(&r, s, "")
        })),
        ("AC4 cloud expansion values and sampling", Box::new(|| {
            let (r, s) = suite("cl-hp-val", 1.0, 6);
            from_suite(&r, s, "")
        })),
        ("AC5 clique expansion and rounding concentration", Box::new(|| {
            let (r, s) = suite("clique", 1.0, 8);
            from_suite(&r, s, "")
        })),
        ("AC6 greedy arity-1 ratio", Box::new(|| {
            let (r, s) = suite("greedy-dksh1", 2.5, 10);
            from_suite(&r, s, "")
        })),
        ("AC7 densest-subgraph to 2-CSP soundness and completeness", Box::new(|| {
            let (r, s) = suite("dks-2csp", 4.0, 12);
            from_suite(&r, s, "")
        })),
        ("AC8 weighted pipeline feasibility and floor", Box::new(ac8)),
        ("AC9 gadget completeness", Box::new(ac9)),
        ("AC10 Gaussian stability", Box::new(|| {
            let (r, s) = suite("gamma", 1.0, 8);
            from_suite(&r, s, "")
        })),
        ("AC11 determinism across runs and thread counts", Box::new(ac11)),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let o = run();
        println!("{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {failed} failing criteria");
    if failed > 0 {
        std::process::exit(1);
    }
}
