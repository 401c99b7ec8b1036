//! End-to-end checks of the binary surface: config handling, exit codes, and
//! trace-file formats.

use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_geosplit"))
}

fn write_tmp(dir: &tempfile::TempDir, name: &str, text: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

const ROSENBROCK: &str = "\
problem = rosenbrock
a = 1
b = 2
lambda = 1
method = dr_mann
alpha = 0.5
tol = 1e-14
x0 = 1 2
";

#[test]
fn bundled_configs_all_validate() {
    for name in [
        "table1", "table2_case1", "table2_case2", "table3_case1", "table3_case2",
        "table4_case1", "table4_case2",
    ] {
        let path = format!("{}/configs/{name}.conf", env!("CARGO_MANIFEST_DIR"));
        let out = bin().args(["validate", "--config", &path]).output().unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn invalid_config_exits_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_tmp(&dir, "bad.conf", "problem = rosenbrock\nmethod = dr_mann\n");
    let out = bin().args(["validate", "--config", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("missing required key"), "{stderr}");
}

#[test]
fn momentum_violation_reports_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let text = format!("{ROSENBROCK}x1 = 1 3\ntheta = 0.9\n").replace("dr_mann", "inertial_dr");
    let path = write_tmp(&dir, "theta.conf", &text);
    let out = bin().args(["validate", "--config", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("theta_max"));
}

#[test]
fn unknown_table_exits_with_code_one() {
    let out = bin().args(["reproduce", "table9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn run_writes_the_requested_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_tmp(&dir, "r.conf", ROSENBROCK);
    let trace = dir.path().join("trace.csv");
    let out = bin()
        .args(["run", "--config", cfg.to_str().unwrap(), "--out", trace.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let body = fs::read_to_string(&trace).unwrap();
    assert!(body.contains("# problem = rosenbrock"));
    assert!(body.contains("# status = converged"));
    let header = body.lines().find(|l| !l.starts_with('#')).unwrap();
    assert_eq!(header, "iter,stop_metric,residual,min_residual,objective,elapsed_ms");
    // a converged 31-iteration run yields 31 data rows
    let rows = body.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(rows, 31);
}

#[test]
fn csv_traces_are_deterministic_up_to_elapsed_time() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_tmp(&dir, "r.conf", ROSENBROCK);
    let strip_elapsed = |body: &str| -> String {
        body.lines()
            .map(|l| {
                if l.starts_with('#') || l.starts_with("iter") {
                    l.to_string()
                } else {
                    l.rsplit_once(',').unwrap().0.to_string()
                }
            })
            .collect::<Vec<_>>()
            .join("\n")
    };
    let mut runs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let trace = dir.path().join(name);
        let out = bin()
            .args(["run", "--config", cfg.to_str().unwrap(), "--out", trace.to_str().unwrap()])
            .output()
            .unwrap();
        assert!(out.status.success());
        runs.push(strip_elapsed(&fs::read_to_string(&trace).unwrap()));
    }
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn json_trace_round_trips_to_identical_values() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_tmp(&dir, "r.conf", ROSENBROCK);
    let trace = dir.path().join("trace.json");
    let out = bin()
        .args([
            "run",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            trace.to_str().unwrap(),
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let parsed: serde_json::Value = serde_json::from_str(&fs::read_to_string(&trace).unwrap()).unwrap();
    assert_eq!(parsed["status"], "converged");
    let records = parsed["records"].as_array().unwrap();
    assert_eq!(records.len(), 31);
    // 17-significant-digit rendering reconstructs each double exactly, so a
    // re-rendered first record matches the file bit for bit
    let first = &records[0];
    for key in ["stop_metric", "residual", "min_residual", "objective"] {
        let v = first[key].as_f64().unwrap();
        let reparsed: f64 = format!("{v:.16e}").parse().unwrap();
        assert_eq!(v.to_bits(), reparsed.to_bits());
    }
    // config echo is embedded
    let config = parsed["config"].as_array().unwrap();
    assert!(config.iter().any(|pair| pair[0] == "problem" && pair[1] == "rosenbrock"));
}

#[test]
fn oracle_compare_passes_on_the_rosenbrock_instance() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_tmp(&dir, "r.conf", ROSENBROCK);
    let out = bin().args(["oracle-compare", "--config", cfg.to_str().unwrap()]).output().unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("PASS"), "{stdout}");
}
