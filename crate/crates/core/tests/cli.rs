use std::process::{Command, Output};

use qhermite::cli::RunReport;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhermite"))
        .args(args)
        .env_remove("QHERMITE_PRECISION")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn eval_matches_reference_values() {
    let o = run(&["eval", "--n", "2", "--q", "1.4142135623730951", "--xi", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - (4.0 / (2f64.sqrt() * 2.0) - 1.0)).abs() < 1e-14);

    let o = run(&["eval", "--n", "20", "--q", "2", "--xi", "2.5", "--method", "closed-form"]);
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v + 0.070882231580658185408).abs() < 1e-15);
}

#[test]
fn eval_json_reports_both_methods() {
    let o = run(&["eval", "--n", "6", "--q", "1.2", "--xi", "-0.7", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["n"], 6);
    let rec = v["recursion"].as_f64().unwrap();
    assert!((rec - 4.4711297837760029782).abs() < 1e-14);
    assert!(v["discrepancy"].as_f64().unwrap() < 1e-13);
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qhermite"))
        .args(["eval", "--n", "6", "--q", "1.2", "--xi", "0.7"])
        .env("QHERMITE_PRECISION", "30")
        .output()
        .unwrap();
    assert_eq!(stdout(&o).trim(), "4.4711297837760029782303469649863e0");
}

#[test]
fn usage_and_domain_errors_exit_2() {
    assert_eq!(run(&["eval", "--n", "3", "--q", "0.5", "--xi", "1"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--q", "1.0"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--precision", "40", "verify"]).status.code(), Some(2));
    let o = run(&["table", "measure", "--max-terms", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("max_terms"));
}

#[test]
fn failed_check_exits_1() {
    let o = run(&["verify", "--suite", "recursion", "--tol", "0"]);
    assert_eq!(o.status.code(), Some(1));
    let r = RunReport::from_json(&stdout(&o)).unwrap();
    assert!(!r.pass);
    assert!(r.failures().count() > 0);
}

#[test]
fn non_convergence_exits_3() {
    assert_eq!(run(&["verify", "--suite", "moments", "--max-terms", "8"]).status.code(), Some(3));
    let o = run(&["table", "measure", "--cutoff", "5", "--series-tol", "1e-14"]);
    assert_eq!(o.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["converged"], false);
}

#[test]
fn verify_all_passes_and_round_trips() {
    let o = run(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let r = RunReport::from_json(&text).unwrap();
    assert!(r.pass);
    assert!(r.checks.len() > 100);
    assert_eq!(r.to_json(), text.trim_end());
}

#[test]
fn verify_is_deterministic_apart_from_timing() {
    let strip = |o: Output| {
        let mut r = RunReport::from_json(&stdout(&o)).unwrap();
        r.seconds = 0.0;
        r.to_json()
    };
    let a = strip(run(&["verify", "--suite", "orthogonality", "--q", "1.5"]));
    let b = strip(run(&["verify", "--suite", "orthogonality", "--q", "1.5"]));
    assert_eq!(a, b);
}

#[test]
fn moments_table_values() {
    let o = run(&["table", "moments", "--q", "1.4142135623730951", "--nmax", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    let m2 = rows[2][1].as_f64().unwrap();
    let m4 = rows[4][1].as_f64().unwrap();
    assert!((m2 - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    assert!((m4 - 3.5).abs() < 1e-13);
    for row in rows {
        assert!(row[5].as_f64().unwrap() < 1e-10);
    }
}

#[test]
fn measure_table_csv_has_even_support() {
    let o = run(&["table", "measure", "--format", "csv", "--cutoff", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let mut rdr = csv::Reader::from_reader(o.stdout.as_slice());
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["nu", "tau", "x", "xi", "weight", "converged"]);
    let mut total = 0.0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let nu: i64 = rec[0].parse().unwrap();
        let w: f64 = rec[4].parse().unwrap();
        assert!(nu % 2 == 0 || w == 0.0);
        total += w;
    }
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn polynomial_table_to_file() {
    let dir = std::env::temp_dir().join(format!("qhermite-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("poly.json");
    let o = run(&["table", "polynomial", "--nmax", "1", "--output", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let c1 = v["rows"][1][2].as_f64().unwrap();
    assert!((c1 - 2.0 / 1.3f64.sqrt()).abs() < 1e-15);
    std::fs::remove_dir_all(dir).unwrap();
}
