use fracmix::config::ConfigFile;
use fracmix::mode_solver::{degenerate_b, ProblemConfig};
use fracmix::Phi;
use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fracmix"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn fracmix")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_config(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn write_problem(dir: &TempDir, name: &str, cfg: &ProblemConfig) -> PathBuf {
    write_config(dir, name, &ConfigFile::from_problem(cfg).unwrap().to_json())
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const DEMO: &str = r#"{"s": 1, "alpha": 0.5, "beta": 1.5, "a": 1, "b": 1, "p0": 0,
  "phi": {"sine_coeffs": [1, 0, 0.5]}, "K": 64, "grid": {"nx": 64, "ny": 64}}"#;

fn read_field(path: &Path) -> Vec<(f64, f64, f64)> {
    let mut r = csv::Reader::from_path(path).unwrap();
    assert_eq!(r.headers().unwrap(), vec!["x", "y", "u"]);
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            let f = |i| rec.get(i).unwrap().parse::<f64>().unwrap();
            (f(0), f(1), f(2))
        })
        .collect()
}

fn degenerate(phi: Phi) -> ProblemConfig {
    let mut cfg = ProblemConfig::demo();
    cfg.a = 3.0;
    cfg.k = 8;
    cfg.grid.nx = 16;
    cfg.grid.ny = 16;
    cfg.phi = phi;
    cfg.b = degenerate_b(&cfg, 1, 1e-6, 1e6, 1e-10).unwrap();
    cfg
}

#[test]
fn ml_values() {
    let o = run(&["ml", "--mu", "1", "--eta", "1", "--z", "-1"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("0.367879441171"), "{}", stdout(&o));
    let o = run(&["ml", "--mu", "0.5", "--eta", "1", "--z", "-1", "--tol", "1e-14"]);
    // e·erfc(1)
    assert!(stdout(&o).starts_with("0.4275835761558"), "{}", stdout(&o));
}

#[test]
fn ml_zero_scans() {
    let o = run(&["ml", "zeros", "--mu", "1.2", "--eta", "2", "--tmax", "1000"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "none");
    let o = run(&["ml", "zeros", "--mu", "1.9", "--eta", "1", "--tmax", "10"]);
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines.last().unwrap().starts_with("h = "));
    let z: f64 = lines[0].parse().unwrap();
    assert!(z > 2.0 && z < 2.6, "{text}");
}

#[test]
fn domain_errors_exit_2() {
    let o = run(&["ml", "--mu", "3", "--eta", "1", "--z", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("mu"));
    let o = run(&["ml", "zeros", "--mu", "0.5", "--eta", "1", "--tmax", "10"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = TempDir::new().unwrap();
    let bad = write_config(&dir, "bad.json", &DEMO.replace("\"K\": 64", "\"K\": 64, \"extra\": 1"));
    assert_eq!(run(&["delta", s(&bad)]).status.code(), Some(2));
    let bad = write_config(&dir, "alpha.json", &DEMO.replace("\"alpha\": 0.5", "\"alpha\": 1.5"));
    assert_eq!(run(&["solve", s(&bad), "--out", "/dev/null"]).status.code(), Some(2));
    assert_eq!(run(&["eigs", "/nonexistent/config.json"]).status.code(), Some(2));
}

#[test]
fn delta_scan_and_summary() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", &DEMO.replace("\"beta\": 1.5", "\"beta\": 1.2"));
    let summary = dir.path().join("summary.json");
    let o = run(&["delta", s(&cfg), "--kmax", "50", "--summary", s(&summary)]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("k,lambda_k,delta_k"));
    assert_eq!(text.lines().count(), 51);
    let sm: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    // −1/Γ(0.8), Γ(0.8) = 1.1642297137253030
    let limit = sm["limit"].as_f64().unwrap();
    assert!((limit + 0.858_937_019_224_667_7).abs() < 1e-12, "{limit}");
    assert_eq!(sm["zero_free_guaranteed"], Value::Bool(true));
    assert!(sm["flagged"].as_array().unwrap().is_empty());

    let o = run(&["delta", s(&cfg), "--kmax", "1"]);
    assert_eq!(stdout(&o).lines().count(), 2);
}

#[test]
fn strict_delta_on_a_degenerate_config_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = write_problem(&dir, "deg.json", &degenerate(Phi::SineCoeffs(vec![1.0])));
    let o = run(&["delta", s(&cfg)]);
    assert!(o.status.success());
    let o = run(&["delta", s(&cfg), "--strict"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn solve_single_mode() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", &DEMO.replace("[1, 0, 0.5]", "[1]"));
    let out = dir.path().join("field.csv");
    let o = run(&["solve", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_field(&out);
    assert_eq!(rows.len(), 65 * 65);
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert!(meta["jump_residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(meta["tail_bound"].as_f64(), Some(0.0));
    let modes = meta["modes"].as_array().unwrap();
    assert_eq!(modes.len(), 64);
    assert!(modes[1..].iter().all(|m| m["c1"].as_f64() == Some(0.0)));
    // u(x, y) = X₁(x) u₁(y): every x-row is a multiple of sin x.
    let c1 = modes[0]["c1"].as_f64().unwrap();
    let x1 = (2.0 / std::f64::consts::PI).sqrt();
    for &(x, y, u) in &rows {
        if y == 0.0 {
            assert!((u - x1 * x.sin() * c1).abs() < 1e-13);
        }
    }
    let ys: Vec<f64> = rows.iter().take(65).map(|r| r.1).collect();
    assert!(ys.contains(&0.0) && ys.contains(&-1.0) && ys.contains(&1.0));
}

#[test]
fn solve_zero_data() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", &DEMO.replace("[1, 0, 0.5]", "[]"));
    let out = dir.path().join("field.csv");
    assert!(run(&["solve", s(&cfg), "--out", s(&out)]).status.success());
    assert!(read_field(&out).iter().all(|r| r.2 == 0.0));
}

#[test]
fn infeasible_and_solvable_degenerate_problems() {
    let dir = TempDir::new().unwrap();
    let cfg = write_problem(&dir, "deg.json", &degenerate(Phi::SineCoeffs(vec![1.0, 0.5])));
    let out = dir.path().join("field.csv");
    let o = run(&["solve", s(&cfg), "--out", s(&out)]);
    assert_eq!(o.status.code(), Some(4));
    let v: Value = serde_json::from_str(stdout(&o).trim()).unwrap();
    assert_eq!(v, serde_json::json!({ "infeasible": [1] }));

    let cfg = write_problem(&dir, "ok.json", &degenerate(Phi::SineCoeffs(vec![0.0, 0.5])));
    let o = run(&["solve", s(&cfg), "--out", s(&out)]);
    assert!(o.status.success());
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    assert_eq!(meta["zeroed_modes"], serde_json::json!([1]));
    assert!(meta["jump_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn csv_is_deterministic_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", DEMO);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(run(&["solve", s(&cfg), "--out", s(&a)]).status.success());
    let o = bin()
        .env("FRACMIX_THREADS", "1")
        .args(["solve", s(&cfg), "--out", s(&b)])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let first = std::fs::read_to_string(&a).unwrap();
    let row = first.lines().nth(1).unwrap();
    for field in row.split(',') {
        let digits = field.chars().filter(char::is_ascii_digit).skip_while(|c| *c == '0').count();
        assert!(digits == 17 || field.trim_start_matches('-').chars().all(|c| c == '0' || c == '.'), "{row}");
    }
    let o = bin().env("FRACMIX_THREADS", "zero").args(["eigs", s(&cfg)]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_demo_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", DEMO);
    let out = dir.path().join("field.csv");
    assert!(run(&["solve", s(&cfg), "--out", s(&out)]).status.success());
    let report_path = dir.path().join("report.json");
    let o = run(&["verify", s(&cfg), "--field", s(&out), "--out", s(&report_path)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["pass"], Value::Bool(true));
    let names: Vec<&str> = report["items"].as_array().unwrap().iter().map(|i| i["name"].as_str().unwrap()).collect();
    assert_eq!(
        names,
        ["ml_identities", "eigen", "uniqueness", "phi_validation", "transmission", "flux_fd", "residual", "oracle_orders", "field_file"]
    );
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap()).unwrap();
    let file_jump = report["items"][8]["measured"]["jump_residual"].as_f64().unwrap();
    assert!((file_jump - meta["jump_residual"].as_f64().unwrap()).abs() <= 1e-12);
    assert_eq!(std::fs::read_to_string(&report_path).unwrap().trim(), stdout(&o).trim());
}

#[test]
fn verify_parabola_records_warnings_and_fails_at_tight_tolerance() {
    let dir = TempDir::new().unwrap();
    let pi = std::f64::consts::PI;
    let samples: Vec<String> = (0..=4096)
        .map(|i| {
            let x = pi * i as f64 / 4096.0;
            format!("{:e}", x * (pi - x))
        })
        .collect();
    let base = DEMO.replace("{\"sine_coeffs\": [1, 0, 0.5]}", &format!("{{\"samples\": [{}]}}", samples.join(",")));
    let loose = write_config(&dir, "loose.json", &base.replace("\"K\": 64", "\"K\": 64, \"tolerances\": {\"jump\": 1e-3}"));
    let o = run(&["verify", s(&loose)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let warn = report["items"].as_array().unwrap().iter().find(|i| i["name"] == "phi_validation").unwrap();
    assert_eq!(warn["pass"], Value::Bool(false));
    assert!(!warn["measured"]["warnings"].as_array().unwrap().is_empty());

    let tight = write_config(&dir, "tight.json", &base);
    let o = run(&["verify", s(&tight)]);
    assert_eq!(o.status.code(), Some(5));
}

#[test]
fn verify_classical_switch() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "c.json",
        &DEMO
            .replace("\"alpha\": 0.5", "\"alpha\": 1")
            .replace("\"beta\": 1.5", "\"beta\": 2")
            .replace("\"K\": 64", "\"K\": 16, \"classical_switch\": true"),
    );
    let o = run(&["verify", s(&cfg)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let item = report["items"].as_array().unwrap().last().unwrap().clone();
    assert_eq!(item["name"], "classical_limit");
    assert!(item["measured"]["max_error"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn eigs_for_higher_order_operator() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "c.json", &DEMO.replace("\"s\": 1", "\"s\": 2").replace("\"p0\": 0", "\"p0\": 1.5"));
    let o = run(&["eigs", s(&cfg), "--kmax", "5"]);
    assert!(o.status.success());
    let lambdas: Vec<f64> = stdout(&o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(lambdas, vec![2.5, 17.5, 82.5, 257.5, 626.5]);
}
