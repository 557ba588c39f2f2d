use std::path::Path;
use std::process::{Command, Output};

use nonholo::trajectory_csv::read_trajectory;
use nonholo_core::symcore::{parse_expr, SymbolTable};
use serde_json::Value;

const LORENZ: [&str; 6] = ["--param", "sigma=10", "--param", "r=28", "--param", "b=8/3"];

fn nonholo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonholo"))
        .args(args)
        .env_remove("NONHOLO_THREADS")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn analyze_lorenz_reports_the_holonomicity() {
    let o = nonholo(&["analyze", "--catalog", "lorenz"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["schema"], "nonholo/1");
    assert_eq!(r["holonomicity"]["is_zero"], false);
    let t = SymbolTable::with_params(["sigma", "r", "b"]).unwrap();
    let got = parse_expr(r["holonomicity"]["text"].as_str().unwrap(), &t).unwrap();
    let want = parse_expr("sigma*x*y - 2*sigma*x^2 + y^2 - b*r*z + b*z^2 + b*sigma*z", &t).unwrap();
    assert!(got.equals(&want));
    assert_eq!(r["connection"]["delta"].as_str().map(|s| !s.is_empty()), Some(true));
    assert_eq!(r["chern_simons"]["available"], true);
}

#[test]
fn analyze_files() {
    let dir = tempfile::tempdir().unwrap();
    let grad = write(dir.path(), "grad.json", r#"{ "P": "y*z", "Q": "x*z", "R": "x*y" }"#);
    let r = json(&nonholo(&["analyze", "--system", &grad]));
    assert_eq!(r["exact"], true);
    for k in 0..3 {
        assert_eq!(r["exactness_residuals"][k]["is_zero"], true);
    }
    let quad = write(
        dir.path(),
        "q.json",
        r#"{ "catalog": "quadratic10", "params": { "k": 1, "l": "-2/3", "a": 5 } }"#,
    );
    let r = json(&nonholo(&["analyze", "--system", &quad]));
    assert_eq!(r["holonomicity"]["is_zero"], true);
    assert_eq!(r["euler_contraction"]["is_zero"], true);
}

#[test]
fn usage_and_io_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&nonholo(&["analyze", "--system", "/nonexistent/sys.json"])), 2);
    let bad = write(dir.path(), "bad.json", r#"{ "P": "x +", "Q": "y", "R": "z" }"#);
    assert_eq!(code(&nonholo(&["analyze", "--system", &bad])), 2);
    let unknown = write(dir.path(), "unknown.json", r#"{ "catalog": "lorenz", "colour": 1 }"#);
    assert_eq!(code(&nonholo(&["analyze", "--system", &unknown])), 2);
    assert_eq!(code(&nonholo(&["analyze", "--catalog", "lorenz", "--param", "sigma"])), 2);
    assert_eq!(code(&nonholo(&["analyze", "--catalog", "lorenz", "--param", "q=1"])), 2);
    assert_eq!(code(&nonholo(&["flow", "--catalog", "lorenz", "--init", "1,1"])), 2);
    assert_eq!(code(&nonholo(&["frobnicate"])), 2);
}

#[test]
fn flow_of_a_constant_field() {
    let dir = tempfile::tempdir().unwrap();
    let sys = write(dir.path(), "c.json", r#"{ "P": "1", "Q": "0", "R": "0" }"#);
    let out = dir.path().join("flow.csv");
    let o = nonholo(&[
        "flow", "--system", &sys, "--init", "0,0,0", "--s-end", "2", "--method", "rk4", "--step", "0.1",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_trajectory(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(t.columns, ["x", "y", "z"]);
    let (s, end) = t.last().unwrap();
    assert_eq!(s, 2.0);
    assert!((end[0] - 2.0).abs() < 1e-12 && end[1] == 0.0 && end[2] == 0.0);
}

#[test]
fn geodesic_keeps_its_contraction() {
    let mut args = vec!["geodesic", "--catalog", "lorenz", "--init", "1,1,1", "--vel", "0.1,-0.1,0"];
    args.extend(LORENZ);
    args.extend(["--s-end", "1", "--output-step", "0.1"]);
    let o = nonholo(&args);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("# schema: nonholo/1\n"));
    assert!(text.ends_with("# termination: completed\n"));
    let t = read_trajectory(&text).unwrap();
    assert_eq!(t.len(), 11);
    let c = t.column("pfaff_contraction").unwrap();
    assert!(c.iter().all(|v| (v - c[0]).abs() < 1e-8));
}

#[test]
fn singular_start_exits_3() {
    let mut args = vec!["geodesic", "--catalog", "lorenz", "--init", "0,0,0", "--vel", "1,0,0"];
    args.extend(LORENZ);
    assert_eq!(code(&nonholo(&args)), 3);
}

#[test]
fn asymptotic_and_extend() {
    let mut args = vec!["asymptotic", "--catalog", "lorenz", "--init", "3,1,20", "--branch", "1"];
    args.extend(LORENZ);
    args.extend(["--s-end", "0.5", "--output-step", "0.1"]);
    let o = nonholo(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_trajectory(&String::from_utf8(o.stdout).unwrap()).unwrap();
    assert_eq!(t.columns, ["x", "y", "z", "discriminant"]);

    let mut args = vec!["extend", "--catalog", "lorenz", "--init", "1,1,1,0.3,-0.2,0.5"];
    args.extend(["--vel", "0.1,-0.1,0,0.1,0,-0.1", "--s-end", "0.5", "--output-step", "0.1"]);
    args.extend(LORENZ);
    let o = nonholo(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let t = read_trajectory(&String::from_utf8(o.stdout).unwrap()).unwrap();
    let g = t.column("metric_norm").unwrap();
    assert!(g.iter().all(|v| (v - g[0]).abs() < 1e-8));
    assert!(t.column("base_deviation").unwrap().iter().all(|d| *d < 1e-6));
}

#[test]
fn chern_simons_boxes() {
    let dir = tempfile::tempdir().unwrap();
    let flat = write(dir.path(), "flat.json", r#"{ "P": "1", "Q": "2", "R": "3" }"#);
    let r = json(&nonholo(&["chern-simons", "--system", &flat, "--box", "0,1,0,1,0,1", "--grid", "3"]));
    assert_eq!(r["quadrature"]["value"], 0.0);
    assert_eq!(r["density"], "0");

    let mut args = vec!["chern-simons", "--catalog", "lorenz", "--box", "2,3,2,3,5,6", "--grid", "10"];
    args.extend(LORENZ);
    let r = json(&nonholo(&args));
    assert!(r["quadrature"]["relative_change"].as_f64().unwrap() < 0.05);
    let modes = r["reference_comparison"].as_array().unwrap();
    assert_eq!(modes.len(), 2);

    let mut args = vec!["chern-simons", "--catalog", "lorenz", "--box", "-1,1,-1,1,-1,1", "--mode", "covariant"];
    args.extend(LORENZ);
    assert_eq!(code(&nonholo(&args)), 3);
}

#[test]
fn catalog_lists_systems() {
    let r = json(&nonholo(&["catalog"]));
    let names: Vec<&str> = r["systems"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    for n in ["lorenz", "rossler", "triple_product", "vdp_projective", "quadratic10"] {
        assert!(names.contains(&n), "{n}");
    }
}

#[test]
fn verify_passes_and_names_injected_failures() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify.json");
    let o = nonholo(&["verify", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["schema"], "nonholo/1");
    assert!(r["groups"].as_array().unwrap().len() >= 12);

    let o = nonholo(&["verify", "--inject", "lorenz_holonomicity"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("lorenz_holonomicity"));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL lorenz_holonomicity"));

    let o = nonholo(&["verify", "--inject", "contraction_conservation"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn thread_cap_is_read_from_the_environment() {
    let run = |v: &str| {
        Command::new(env!("CARGO_BIN_EXE_nonholo"))
            .args(["chern-simons", "--catalog", "lorenz", "--box", "2,3,2,3,5,6", "--grid", "4"])
            .args(LORENZ)
            .env("NONHOLO_THREADS", v)
            .output()
            .unwrap()
    };
    let one = run("1");
    assert_eq!(code(&one), 0);
    let four = run("4");
    assert_eq!(json(&one)["quadrature"], json(&four)["quadrature"]);
    assert_eq!(code(&run("zero")), 2);
}
