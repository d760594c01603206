use serde_json::Value;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_m1poly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (out.status.code().unwrap(), v)
}

fn entry_at(v: &Value, key: &str, at: f64) -> Value {
    v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["inputs"][key] == at)
        .cloned()
        .expect("entry present")
}

#[test]
fn eval_chihara_example() {
    let (code, v) = json(&[
        "eval",
        "--family",
        "chihara",
        "--params",
        "mu=0.5,gamma=0,x=2",
        "--nmax",
        "3",
    ]);
    assert_eq!(code, 0);
    let e = entry_at(&v, "n", 2.0);
    assert!((e["rhs"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert!((e["lhs"].as_f64().unwrap() - 1.0).abs() < 1e-14);
    assert_eq!(v["summary"]["total"], 4);
    assert_eq!(v["config"]["seed"], 42);
}

#[test]
fn eval_bannai_ito_degree_zero() {
    let (code, v) = json(&[
        "eval",
        "--family",
        "bannai-ito",
        "--params",
        "rho1=0.1,rho2=0.3,r1=0.7,r2=1.9,x=0.4",
        "--nmax",
        "0",
    ]);
    assert_eq!(code, 0);
    let e = entry_at(&v, "n", 0.0);
    assert_eq!(
        (e["lhs"].as_f64(), e["rhs"].as_f64()),
        (Some(1.0), Some(1.0))
    );
}

#[test]
fn parameter_errors_exit_two_with_a_message() {
    let out = run(&["eval", "--family", "big-jacobi", "--params", "c=1"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("|c|"), "{msg}");
    let out = run(&[
        "gram",
        "--family",
        "bannai-ito",
        "--params",
        "rho1=0.31,rho2=0.77,r1=0.12,r2=0.59,N=3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("truncation"));
    assert_eq!(
        run(&["eval", "--family", "chihara", "--params", "nu=1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["convcheck"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn gram_examples_pass() {
    let (code, v) = json(&["gram", "--family", "dual-hahn", "--params", "N=2"]);
    assert_eq!((code, v["summary"]["failed"].as_u64()), (0, Some(0)));
    let (code, v) = json(&["gram", "--family", "chihara", "--nmax", "4"]);
    assert_eq!(code, 0);
    assert!(v["summary"]["max_rel_residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn convcheck_fixed_trivial_labels() {
    let (code, v) = json(&[
        "convcheck",
        "--identity",
        "conv1",
        "--params",
        "N=0,j=0",
        "--draws",
        "5",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["summary"]["max_abs_residual"], 0.0);
    for e in v["entries"].as_array().unwrap() {
        assert_eq!(e["seed"], 42);
    }
}

#[test]
fn convcheck_conv2_sweep() {
    let (code, v) = json(&[
        "convcheck",
        "--identity",
        "conv2",
        "--nmax",
        "5",
        "--draws",
        "30",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["summary"]["total"], 30);
    assert!(v["summary"]["max_rel_residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn reruns_are_byte_identical_and_seed_sensitive() {
    let args = [
        "convcheck",
        "--identity",
        "bilinear",
        "--draws",
        "10",
        "--seed",
        "7",
    ];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let c = run(&[
        "convcheck",
        "--identity",
        "bilinear",
        "--draws",
        "10",
        "--seed",
        "8",
    ]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn injected_failure_exits_one() {
    let out = run(&[
        "convcheck",
        "--identity",
        "conv1-inverse",
        "--draws",
        "5",
        "--tol",
        "1e-30",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn coupling_tables() {
    let (code, v) = json(&["coupling", "--family", "cg", "--nmax", "0"]);
    assert_eq!(code, 0);
    assert_eq!(
        v["table"]["rows"],
        serde_json::json!([[0.0, 0.0, 0.0, 0.0, 1.0]])
    );
    let (code, v) = json(&[
        "coupling",
        "--family",
        "cg",
        "--nmax",
        "6",
        "--params",
        "mu1=0.6,mu2=0.9,eps2=-1",
    ]);
    assert_eq!(code, 0);
    assert!(v["summary"]["max_abs_residual"].as_f64().unwrap() <= 1e-10);
    let (code, v) = json(&["coupling", "--family", "racah", "--nmax", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["table"]["rows"], serde_json::json!([[0.0, 0.0, 1.0]]));
}

#[test]
fn csv_output_to_file() {
    let dir = std::env::temp_dir().join(format!("m1poly-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.csv");
    let out = run(&[
        "gram",
        "--family",
        "dual-hahn",
        "--params",
        "N=3",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    assert_eq!(&headers[0], "identity");
    assert_eq!(&headers[headers.len() - 2], "pass");
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| &r[headers.len() - 2] == "true"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_does_not_depend_on_destination() {
    let dir = std::env::temp_dir().join(format!("m1poly-dest-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (a, b) = (dir.join("a.json"), dir.join("b.json"));
    for p in [&a, &b] {
        assert_eq!(
            run(&[
                "convcheck",
                "--identity",
                "conv1",
                "--draws",
                "4",
                "--out",
                p.to_str().unwrap()
            ])
            .status
            .code(),
            Some(0)
        );
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    std::fs::remove_dir_all(&dir).unwrap();
}
