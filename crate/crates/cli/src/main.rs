//! `biascsp`: predicate analysis, reductions, solvers, gadget sampling and self-checks
//! over JSON instance files. Every command prints one JSON report on stdout.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biascsp_core::gadget::hypercube::hypercube_acceptance;
use biascsp_core::gadget::sse::{sse_acceptance, RegularGraph};
use biascsp_core::gadget::ug::{ug_acceptance, UgInstance};
use biascsp_core::gadget::{gamma2, gaussian_stability, Assignment, GadgetParams, GadgetTest, TabulatedFunction};
use biascsp_core::io::{Instance, InstanceFile};
use biascsp_core::reductions::{
    bias_rescale, clique_expansion, cloud_expansion, cloud_sizes, dks_to_2csp, dksh_to_predicate, heavy_set,
    heavy_vertex_split, predicate_to_dksh, RescaleDirection,
};
use biascsp_core::seed::rng_for;
use biascsp_core::solvers::{solve_dks, solve_dksh_weighted, solve_general, DksBackend, SolverConfig};
use biascsp_core::verify::{run_claim, VerifyConfig, CLAIMS};
use biascsp_core::{Labeling, Predicate};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser, Debug)]
#[command(name = "biascsp", version, about = "Biased CSP and densest-subhypergraph toolkit")]
struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Root seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Minimal accepting strings and bias independence of a predicate.
    AnalyzePredicate(PredicateArgs),
    /// Transform an instance and print the result with its certificate.
    Reduce(ReduceArgs),
    /// Run an approximation algorithm.
    Solve(SolveArgs),
    /// Run a named self-check suite.
    Verify(VerifyArgs),
    /// Estimate acceptance of a noise test, or evaluate Gaussian stability.
    Gadget(GadgetArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct PredicateArgs {
    /// Built-in name (AND:3, NEQ, EXACT:2:3, BETA:110, ...) or a truth table such as 0110.
    #[arg(long)]
    table: Option<String>,
    /// Predicate JSON file.
    #[arg(long)]
    predicate: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ReduceKind {
    DkshToPred,
    PredToDksh,
    HeavySplit,
    Cloud,
    Clique,
    #[value(name = "dks-to-2csp")]
    #[serde(rename = "dks-to-2csp")]
    DksTo2csp,
    Rescale,
}

#[derive(Args, Debug)]
struct ReduceArgs {
    #[arg(long, value_enum)]
    kind: ReduceKind,
    /// Instance JSON file (not needed for rescale).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Also write the produced instance here.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    bias: Option<f64>,
    /// Target predicate for dksh-to-pred (same syntax as analyze-predicate --table).
    #[arg(long)]
    predicate: Option<String>,
    /// Minimal accepting string to embed along, as bits; defaults to the first one of the edge arity.
    #[arg(long)]
    beta: Option<String>,
    #[arg(long, default_value_t = 0.5)]
    eta: f64,
    #[arg(long, default_value_t = 10.0)]
    heavy_exponent: f64,
    /// Labels of the heavy vertices as bits, in ascending vertex order; default all zero.
    #[arg(long)]
    sigma_t: Option<String>,
    /// Labeling to rescale, as bits.
    #[arg(long)]
    labeling: Option<String>,
    #[arg(long)]
    ell: Option<f64>,
    #[arg(long, value_enum, default_value_t = Direction::Pad)]
    direction: Direction,
    #[arg(long, default_value_t = 1_000_000)]
    resolution: u64,
    #[arg(long, default_value_t = 1_000_000)]
    cap: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Direction {
    Pad,
    Subsample,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Problem {
    Dks,
    Dksh,
    Csp,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Backend {
    Exact,
    GreedyPeel,
    #[value(name = "via-2csp")]
    Via2csp,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum)]
    problem: Problem,
    #[arg(long)]
    input: PathBuf,
    /// Overrides the instance's own bias.
    #[arg(long)]
    bias: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, value_enum)]
    backend: Option<Backend>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    heavy_exponent: Option<f64>,
    #[arg(long)]
    heavy_cap: Option<usize>,
    #[arg(long)]
    size_band: Option<f64>,
    #[arg(long)]
    cloud_budget: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long)]
    claim: String,
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    /// Multiplier on case and sample counts.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TestKind {
    Hypercube,
    Sse,
    Ug,
}

#[derive(Args, Debug)]
#[command(args_conflicts_with_subcommands = true)]
struct GadgetArgs {
    #[command(subcommand)]
    sub: Option<GadgetSub>,
    #[arg(long, value_enum)]
    test: Option<TestKind>,
    /// `dictator`, `constant:<v>` or `table:<file>`.
    #[arg(long, default_value = "dictator")]
    assignment: String,
    /// Parameter JSON, inline or as a file path.
    #[arg(long)]
    params: Option<String>,
    /// Regular graph for the SSE test as an adjacency-list JSON file.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Planted vertex set for the SSE test, comma separated.
    #[arg(long)]
    planted: Option<String>,
    /// Unique-games instance JSON file.
    #[arg(long)]
    ug: Option<PathBuf>,
    /// Labeling of the unique-games instance, comma separated.
    #[arg(long)]
    labeling: Option<String>,
}

#[derive(Subcommand, Debug)]
enum GadgetSub {
    /// Probability that correlated Gaussians all fall below their μ-quantiles.
    Gamma {
        #[arg(long, allow_hyphen_values = true)]
        rho: f64,
        /// Comma-separated biases.
        #[arg(long)]
        mus: String,
    },
}

enum Failure {
    Usage(String),
    Domain(biascsp_core::Error),
    /// A report was produced but some check in it failed.
    Checks(Value),
}

impl From<biascsp_core::Error> for Failure {
    fn from(e: biascsp_core::Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = Result<Value, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

#[derive(Serialize)]
struct RunReport {
    command: &'static str,
    config: Value,
    seed: u64,
    result: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    suite: Option<SuiteCounts>,
}

#[derive(Serialize)]
struct SuiteCounts {
    passed: usize,
    failed: usize,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    let text = read_file(path)?;
    // Shape errors (missing or unknown fields) are usage errors; semantic ones are domain errors.
    let file: InstanceFile =
        serde_json::from_str(&text).map_err(|e| usage(format!("{}: malformed instance: {e}", path.display())))?;
    Ok(file.into_instance()?)
}

fn load_json<T: serde::de::DeserializeOwned>(path: &Path, what: &str) -> Result<T, Failure> {
    serde_json::from_str(&read_file(path)?).map_err(|e| usage(format!("{}: malformed {what}: {e}", path.display())))
}

fn parse_predicate(spec: &str) -> Result<Predicate, Failure> {
    if !spec.is_empty() && spec.chars().all(|c| c == '0' || c == '1') {
        let len = spec.len();
        if !len.is_power_of_two() {
            return Err(usage(format!("truth table length {len} is not a power of two")));
        }
        let table = spec.chars().map(|c| c == '1').collect();
        return Ok(Predicate::from_table(len.trailing_zeros() as usize, table)?);
    }
    Ok(Predicate::named(spec)?)
}

fn parse_list<T: std::str::FromStr>(s: &str, flag: &str) -> Result<Vec<T>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse().map_err(|_| usage(format!("--{flag}: cannot parse {t:?}"))))
        .collect()
}

fn analyze(args: PredicateArgs) -> Result<(Value, Value), Failure> {
    let pred = match (args.table, args.predicate) {
        (Some(t), _) => parse_predicate(&t)?,
        (None, Some(p)) => load_json(&p, "predicate")?,
        (None, None) => unreachable!("clap requires one source"),
    };
    Ok((json!({ "predicate": pred }), to_value(&pred.classify())))
}

fn instance_value(i: &Instance) -> Value {
    to_value(&InstanceFile::from_instance(i))
}

fn reduce(args: ReduceArgs, seed: u64) -> Result<(Value, Value), Failure> {
    let config = json!({
        "kind": args.kind, "input": args.input, "bias": args.bias, "predicate": args.predicate,
        "beta": args.beta, "eta": args.eta, "heavy_exponent": args.heavy_exponent,
        "sigma_t": args.sigma_t, "labeling": args.labeling, "ell": args.ell,
        "direction": format!("{:?}", args.direction).to_lowercase(),
        "resolution": args.resolution, "cap": args.cap,
    });
    let input = || -> Result<Instance, Failure> {
        load_instance(args.input.as_deref().ok_or_else(|| usage("--input is required for this reduction"))?)
    };
    let bias = |inst: &Instance| -> Result<f64, Failure> {
        args.bias.or(inst.bias()).ok_or_else(|| usage("--bias is required (the instance has none)"))
    };
    let dksh = |inst: &Instance| -> Result<biascsp_core::Hypergraph, Failure> {
        match inst {
            Instance::Dksh { graph, .. } => Ok(graph.clone()),
            Instance::Csp(_) => Err(usage("this reduction takes a DkSH instance (no predicate)")),
        }
    };
    let (produced, certificate): (Option<Instance>, Value) = match args.kind {
        ReduceKind::DkshToPred => {
            let inst = input()?;
            let (h, mu) = (dksh(&inst)?, bias(&inst)?);
            let psi = parse_predicate(args.predicate.as_deref().ok_or_else(|| usage("--predicate is required"))?)?;
            let beta = match &args.beta {
                Some(b) => biascsp_core::predicate::parse_bitstring(b)?,
                None => psi
                    .minimal_elements()
                    .into_iter()
                    .find(|b| b.count_ones() as usize == h.arity())
                    .ok_or_else(|| usage(format!("predicate has no minimal string of weight {}", h.arity())))?,
            };
            let red = dksh_to_predicate(&h, &psi, beta, mu)?;
            let out = Instance::Csp(red.instance.clone().with_bias(Some(red.bias)));
            (Some(out), json!({ "beta": psi.bitstring(beta), "map": red }))
        }
        ReduceKind::PredToDksh => {
            let inst = input()?;
            let Instance::Csp(c) = &inst else { return Err(usage("pred-to-dksh takes a CSP instance")) };
            let h = predicate_to_dksh(c)?;
            (Some(Instance::Dksh { graph: h, bias: c.bias() }), Value::Null)
        }
        ReduceKind::HeavySplit => {
            let inst = input()?;
            let (h, mu) = (dksh(&inst)?, bias(&inst)?);
            let heavy = heavy_set(&h, mu, args.heavy_exponent);
            let sigma_t = match &args.sigma_t {
                Some(s) => Labeling::from_bitstring(s)?,
                None => Labeling::zeros(heavy.len()),
            };
            let split = heavy_vertex_split(&h, mu, args.eta, &heavy, &sigma_t)?;
            let sub = split.restriction.sub.clone();
            let mut cert = to_value(&split);
            cert["light_instance"] = to_value(&InstanceFile::from_graph(&sub, None));
            (None, cert)
        }
        ReduceKind::Cloud => {
            let inst = input()?;
            let h = dksh(&inst)?;
            let (sizes, scale) = cloud_sizes(h.vertex_weights(), args.resolution, args.cap)?;
            let cloud = cloud_expansion(&h, &sizes)?;
            let out = Instance::Dksh { graph: cloud.graph.clone(), bias: inst.bias() };
            (Some(out), json!({ "scale": scale, "map": cloud }))
        }
        ReduceKind::Clique => {
            let inst = input()?;
            let (h, mu) = (dksh(&inst)?, bias(&inst)?);
            (Some(Instance::Dksh { graph: clique_expansion(&h, mu)?, bias: Some(mu) }), Value::Null)
        }
        ReduceKind::DksTo2csp => {
            let inst = input()?;
            let (g, mu) = (dksh(&inst)?, bias(&inst)?);
            let mut rng = rng_for(seed, &[]);
            (None, to_value(&dks_to_2csp(&g, mu, &mut rng)?))
        }
        ReduceKind::Rescale => {
            let sigma = Labeling::from_bitstring(args.labeling.as_deref().ok_or_else(|| usage("--labeling is required"))?)?;
            let ell = args.ell.ok_or_else(|| usage("--ell is required"))?;
            let mu = args.bias.ok_or_else(|| usage("--bias is required"))?;
            let dir = match args.direction {
                Direction::Pad => RescaleDirection::Pad,
                Direction::Subsample => RescaleDirection::Subsample,
            };
            let mut rng = rng_for(seed, &[]);
            (None, json!({ "labeling": bias_rescale(&sigma, ell, mu, dir, &mut rng)? }))
        }
    };
    let mut result = json!({ "certificate": certificate });
    if let Some(out) = &produced {
        result["instance"] = instance_value(out);
        if let Some(path) = &args.output {
            let text = biascsp_core::io::instance_to_json(out);
            std::fs::write(path, text + "\n").map_err(|e| usage(format!("cannot write {}: {e}", path.display())))?;
        }
    }
    Ok((config, result))
}

fn solve(args: SolveArgs, seed: u64) -> Result<(Value, Value), Failure> {
    let inst = load_instance(&args.input)?;
    let mu = args.bias.or(inst.bias()).ok_or_else(|| usage("--bias is required (the instance has none)"))?;
    let d = SolverConfig::default();
    let cfg = SolverConfig {
        seed,
        eta: args.eta.unwrap_or(d.eta),
        repetitions: args.reps.or(d.repetitions),
        backend: match args.backend {
            None => d.backend,
            Some(Backend::Exact) => DksBackend::Exact,
            Some(Backend::GreedyPeel) => DksBackend::GreedyPeel,
            Some(Backend::Via2csp) => DksBackend::Via2Csp,
        },
        heavy_exponent: args.heavy_exponent.unwrap_or(d.heavy_exponent),
        heavy_cap: args.heavy_cap.unwrap_or(d.heavy_cap),
        size_band: args.size_band.unwrap_or(d.size_band),
        cloud_budget: args.cloud_budget.unwrap_or(d.cloud_budget),
        rounding_alpha: args.alpha.or(d.rounding_alpha),
    };
    let res = match (args.problem, &inst) {
        (Problem::Dks, Instance::Dksh { graph, .. }) => solve_dks(graph, mu, &cfg)?,
        (Problem::Dksh, Instance::Dksh { graph, .. }) => solve_dksh_weighted(graph, mu, &cfg)?,
        (Problem::Csp, Instance::Csp(c)) => solve_general(c, mu, &cfg)?,
        (Problem::Csp, _) => return Err(usage("--problem csp needs an instance with a predicate")),
        (_, Instance::Csp(_)) => return Err(usage("dks and dksh take an instance without a predicate")),
    };
    let config = json!({ "problem": args.problem, "input": args.input, "bias": mu, "solver": cfg });
    Ok((config, to_value(&res)))
}

fn verify(args: VerifyArgs, seed: u64) -> Result<(Value, Value, SuiteCounts), Failure> {
    let cfg = VerifyConfig { n_max: args.n_max, seed, scale: args.scale };
    let names: Vec<&str> = if args.claim == "all" {
        CLAIMS.to_vec()
    } else if CLAIMS.contains(&args.claim.as_str()) {
        vec![args.claim.as_str()]
    } else {
        return Err(usage(format!("unknown claim {:?}; expected one of {} or all", args.claim, CLAIMS.join(", "))));
    };
    let mut reports = Vec::new();
    for name in names {
        reports.push(run_claim(name, &cfg)?);
    }
    let counts = SuiteCounts {
        passed: reports.iter().map(|r| r.passed).sum(),
        failed: reports.iter().map(|r| r.failed).sum(),
    };
    Ok((json!({ "claim": args.claim, "verify": cfg }), to_value(&reports), counts))
}

fn parse_assignment(spec: &str, test: TestKind) -> Result<Assignment, Failure> {
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match (head, test) {
        ("dictator", _) if rest.is_empty() => Ok(Assignment::Dictator),
        ("constant", _) => {
            let v: f64 = rest.parse().map_err(|_| usage(format!("--assignment: bad constant {rest:?}")))?;
            Ok(Assignment::Constant(v))
        }
        ("table", TestKind::Ug) => Ok(Assignment::LongCodes(load_json(Path::new(rest), "long-code tables")?)),
        ("table", _) => Ok(Assignment::Table(load_json::<TabulatedFunction>(Path::new(rest), "table")?)),
        _ => Err(usage(format!("--assignment: expected dictator, constant:<v> or table:<file>, got {spec:?}"))),
    }
}

fn gadget(args: GadgetArgs, seed: Option<u64>) -> Result<(Value, Value, u64), Failure> {
    if let Some(GadgetSub::Gamma { rho, mus }) = args.sub {
        let mus: Vec<f64> = parse_list(&mus, "mus")?;
        let value = if mus.len() == 2 { gamma2(rho, mus[0], mus[1])? } else { gaussian_stability(rho, &mus)? };
        return Ok((json!({ "test": "gamma", "rho": rho, "mus": mus }), json!({ "probability": value }), 0));
    }
    let test = args.test.ok_or_else(|| usage("gadget needs --test or the gamma subcommand"))?;
    let mut params: GadgetParams = match &args.params {
        None => GadgetParams::default(),
        Some(s) if s.trim_start().starts_with('{') => {
            serde_json::from_str(s).map_err(|e| usage(format!("--params: {e}")))?
        }
        Some(path) => load_json(Path::new(path), "parameters")?,
    };
    if let Some(s) = seed {
        params.seed = s;
    }
    let assignment = parse_assignment(&args.assignment, test)?;
    let (kind, mut config) = match test {
        TestKind::Hypercube => (GadgetTest::Hypercube, json!({})),
        TestKind::Sse => (GadgetTest::Sse, json!({})),
        TestKind::Ug => (GadgetTest::Ug, json!({})),
    };
    let resolved = params.resolve(kind)?;
    let est = match test {
        TestKind::Hypercube => hypercube_acceptance(&resolved, &assignment)?,
        TestKind::Sse => {
            let (graph, planted) = match &args.graph {
                None => {
                    if args.planted.is_some() {
                        return Err(usage("--planted needs --graph"));
                    }
                    RegularGraph::two_cliques(4)?
                }
                Some(path) => {
                    let g: RegularGraph = load_json(path, "graph")?;
                    let list: Vec<usize> = parse_list(args.planted.as_deref().ok_or_else(|| usage("--graph needs --planted"))?, "planted")?;
                    let mut s = vec![false; g.n()];
                    for v in list {
                        *s.get_mut(v).ok_or_else(|| usage(format!("--planted: vertex {v} out of range")))? = true;
                    }
                    (g, s)
                }
            };
            config["graph"] = to_value(&graph);
            config["planted"] = to_value(&planted);
            sse_acceptance(&graph, &planted, &resolved, &assignment)?
        }
        TestKind::Ug => {
            let g = match &args.ug {
                None => UgInstance::cycle(5, resolved.t, 1)?,
                Some(path) => load_json(path, "unique-games instance")?,
            };
            let sigma: Option<Vec<usize>> = match (&args.labeling, &args.ug) {
                (Some(s), _) => Some(parse_list(s, "labeling")?),
                (None, None) => Some((0..g.n()).map(|i| i % g.labels().max(1)).collect()),
                (None, Some(_)) => None,
            };
            config["ug"] = to_value(&g);
            config["labeling"] = to_value(&sigma);
            ug_acceptance(&g, sigma.as_deref(), &resolved, &assignment)?
        }
    };
    config["test"] = json!(format!("{test:?}").to_lowercase());
    config["assignment"] = json!(args.assignment);
    config["params"] = to_value(&resolved);
    Ok((config, to_value(&est), resolved.seed))
}

fn run(cli: Cli) -> Result<RunReport, Failure> {
    let seed = cli.seed.unwrap_or(0);
    let (command, config, result, seed, suite) = match cli.command {
        Command::AnalyzePredicate(a) => {
            let (c, r) = analyze(a)?;
            ("analyze-predicate", c, r, seed, None)
        }
        Command::Reduce(a) => {
            let (c, r) = reduce(a, seed)?;
            ("reduce", c, r, seed, None)
        }
        Command::Solve(a) => {
            let (c, r) = solve(a, seed)?;
            ("solve", c, r, seed, None)
        }
        Command::Verify(a) => {
            let (c, r, counts) = verify(a, seed)?;
            ("verify", c, r, seed, Some(counts))
        }
        Command::Gadget(a) => {
            let (c, r, s) = gadget(a, cli.seed)?;
            ("gadget", c, r, s, None)
        }
    };
    let failed = suite.as_ref().is_some_and(|s| s.failed > 0);
    let report = RunReport { command, config, seed, result, suite };
    if failed {
        return Err(Failure::Checks(to_value(&report)));
    }
    Ok(report)
}

fn log_enabled() -> bool {
    std::env::var("BIASCSP_LOG").is_ok_and(|v| !v.is_empty() && v != "off")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot start {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let start = std::time::Instant::now();
    let outcome: Outcome = run(cli).map(|r| to_value(&r));
    if log_enabled() {
        eprintln!("biascsp: finished in {:.3}s", start.elapsed().as_secs_f64());
    }
    match outcome {
        Ok(report) => {
            println!("{report}");
            ExitCode::SUCCESS
        }
        Err(Failure::Checks(report)) => {
            println!("{report}");
            ExitCode::from(1)
        }
        Err(Failure::Domain(e)) => {
            println!("{}", json!({ "error": { "kind": e.kind(), "message": e.to_string() } }));
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
