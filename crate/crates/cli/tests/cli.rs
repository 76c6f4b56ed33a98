use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biascsp")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("biascsp-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

#[test]
fn neq_is_bias_independent() {
    let out = run(&["analyze-predicate", "--table", "NEQ"]);
    assert_eq!(out.status.code(), Some(0));
    let r = &json(&out)["result"];
    assert_eq!(r["bias_independent"], true);
    assert_eq!(r["exponent"], 1);
}

#[test]
fn exact_backend_on_triangle() {
    let tri = scratch("tri.json", r#"{"n":3,"arity":2,"edges":[[0,1],[1,2],[0,2]]}"#);
    let out = run(&["solve", "--problem", "dks", "--backend", "exact", "--bias", "0.6666666666666666", "--input", tri.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out)["result"]["value"].as_f64().unwrap();
    assert!((v - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn verify_reduction_suite_passes() {
    let out = run(&["verify", "--claim", "cl-red", "--n-max", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["suite"]["failed"], 0);
    assert!(r["suite"]["passed"].as_u64().unwrap() > 0);
}

#[test]
fn exit_codes() {
    let tri = scratch("tri2.json", r#"{"n":3,"arity":2,"edges":[[0,1]]}"#);
    let tri = tri.to_str().unwrap();
    let out = run(&["solve", "--problem", "dks", "--bias", "1.5", "--input", tri]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["error"]["kind"], "infeasible_bias");

    assert_eq!(run(&["solve", "--problem", "dks", "--input", tri, "--frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));

    let bad = scratch("bad.json", r#"{"n":3,"arity":2,"edgez":[[0,1]]}"#);
    let out = run(&["solve", "--problem", "dks", "--bias", "0.5", "--input", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("edgez"));
}

#[test]
fn reduce_writes_instances() {
    let h = scratch("h.json", r#"{"n":4,"arity":2,"edges":[[0,1],[1,2],[2,3]]}"#);
    let dest = h.with_file_name("pred.json");
    let out = run(&[
        "reduce", "--kind", "dksh-to-pred", "--input", h.to_str().unwrap(), "--predicate", "BETA:110", "--bias", "0.5",
        "--output", dest.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&dest).unwrap()).unwrap();
    assert_eq!(written, json(&out)["result"]["instance"]);
    assert_eq!(written["arity"], 3);

    let back = run(&["reduce", "--kind", "pred-to-dksh", "--input", dest.to_str().unwrap()]);
    assert_eq!(back.status.code(), Some(0));
}

#[test]
fn gamma_at_one_half() {
    let out = run(&["gadget", "gamma", "--rho", "0.5", "--mus", "0.5,0.5"]);
    let p = json(&out)["result"]["probability"].as_f64().unwrap();
    assert!((p - 1.0 / 3.0).abs() < 1e-9);
}

#[test]
fn reports_identical_across_threads_and_runs() {
    let h = scratch(
        "w.json",
        r#"{"n":6,"vertex_weights":[1,2,1,3,1,2],"arity":3,"edges":[[0,1,2],[1,3,4],[2,4,5],[0,3,5]],"edge_weights":[1,2,1,1]}"#,
    );
    let h = h.to_str().unwrap();
    let commands: Vec<Vec<&str>> = vec![
        vec!["solve", "--problem", "dksh", "--bias", "0.4", "--input", h, "--seed", "5"],
        vec!["gadget", "--test", "sse", "--params", r#"{"samples":30000,"rho":0.5,"beta":0.3,"eta":0.1}"#],
        vec!["gadget", "--test", "ug", "--params", r#"{"samples":30000}"#, "--seed", "3"],
        vec!["verify", "--claim", "cl-alg-1b", "--scale", "0.2"],
    ];
    for cmd in commands {
        let mut outs = Vec::new();
        for threads in ["1", "4"] {
            for _ in 0..3 {
                let mut args = vec!["--threads", threads];
                args.extend(&cmd);
                let o = run(&args);
                assert_eq!(o.status.code(), Some(0), "{cmd:?}");
                outs.push(o.stdout);
            }
        }
        assert!(outs.iter().all(|o| *o == outs[0]), "{cmd:?} differs across runs");
    }
}
