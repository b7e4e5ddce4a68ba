//! End-to-end checks of the binary: payloads, manifests, exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rgarma"))
}

fn run_ok(args: &[&str], dir: &Path) -> Output {
    let out = bin().args(args).current_dir(dir).output().expect("spawn");
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

fn json(dir: &Path, name: &str) -> serde_json::Value {
    serde_json::from_str(&read(dir, name)).unwrap_or_else(|e| panic!("parse {name}: {e}"))
}

#[test]
fn simulate_is_reproducible_and_writes_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate", "--scheme", "exact", "--eta", "1", "--tau", "0.01", "--n", "500", "--seed",
        "7", "--out", "a.csv",
    ];
    run_ok(&args, dir.path());
    let mut args2 = args;
    args2[12] = "b.csv";
    run_ok(&args2, dir.path());
    assert_eq!(read(dir.path(), "a.csv"), read(dir.path(), "b.csv"));
    let first = read(dir.path(), "a.csv");
    assert!(first.starts_with("n,x\n0,"));
    assert_eq!(first.lines().count(), 501);

    let manifest = json(dir.path(), "a.csv.manifest.json");
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config"]["sde"]["eta"], 1.0);
}

#[test]
fn simulate_arma_scheme() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "simulate", "--scheme", "arma", "--phi", "2,-1", "--mu", "1e-3", "--n", "100",
            "--seed", "1", "--out", "s.csv",
        ],
        dir.path(),
    );
    assert_eq!(read(dir.path(), "s.csv").lines().count(), 101);
}

#[test]
fn decimate_reports_ma_order_rule() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "decimate", "--phi", "0.4,-0.3,0.2", "--nu", "0.2,0.1", "--mu", "1", "--out",
            "d.json",
        ],
        dir.path(),
    );
    let d = json(dir.path(), "d.json");
    assert_eq!(d["input"]["p"], 3);
    assert_eq!(d["input"]["q"], 2);
    assert_eq!(d["steps"][0]["ma_order_rule"], 2);
    assert_eq!(d["steps"][0]["model"]["p"], 3);
    assert_eq!(d["steps"][0]["model"]["q"], 2);
}

#[test]
fn flow_orbit_reaches_asymptotic_noise_pair() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "flow", "--ic", "euler", "--eta", "1", "--kappa", "0", "--sigma2", "1",
            "--iterations", "20", "--out", "orbit.csv",
        ],
        dir.path(),
    );
    let text = read(dir.path(), "orbit.csv");
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let a3 = header.iter().position(|h| *h == "alpha_3").unwrap();
    let b3 = header.iter().position(|h| *h == "beta_3").unwrap();
    let last: Vec<f64> = lines
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse().unwrap())
        .collect();
    assert_eq!(last[0] as usize, 20);
    assert!((last[a3] - 2.0 / 3.0).abs() < 1e-9, "alpha_3 {}", last[a3]);
    assert!((last[b3] - 1.0 / 6.0).abs() < 1e-9, "beta_3 {}", last[b3]);
}

#[test]
fn json_payloads_carry_the_envelope() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "simulate", "--scheme", "exact", "--eta", "1", "--tau", "0.01", "--n", "50",
            "--seed", "3", "--format", "json", "--out", "s.json",
        ],
        dir.path(),
    );
    let s = json(dir.path(), "s.json");
    assert_eq!(s["tau"], 0.01);
    assert_eq!(s["seed"], 3);
    assert_eq!(s["scheme"], "exact");
    assert_eq!(s["values"].as_array().unwrap().len(), 50);

    run_ok(
        &[
            "flow", "--ic", "euler", "--eta", "1", "--iterations", "5", "--format", "json",
            "--out", "f.json",
        ],
        dir.path(),
    );
    let f = json(dir.path(), "f.json");
    assert_eq!(f["diverged"], false);
    assert_eq!(f["orbit"].as_array().unwrap().len(), 6);
    assert_eq!(f["orbit"][0]["psi"][0], 2.0);
}

#[test]
fn classify_euler_ic_is_class_d() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "classify", "--ic", "euler", "--eta", "1", "--kappa", "0.5", "--sigma2", "1",
            "--out", "c.json",
        ],
        dir.path(),
    );
    let c = json(dir.path(), "c.json");
    assert_eq!(c["verdict"], "D");
    assert!((c["fitted"]["u"].as_f64().unwrap() + 1.0).abs() < 1e-6);
    assert!((c["fitted"]["b"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-6);
}

#[test]
fn classify_basin_sweep_writes_grid() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &["classify", "--basin", "--grid-n", "7", "--out", "basin.csv"],
        dir.path(),
    );
    let text = read(dir.path(), "basin.csv");
    assert!(text.starts_with("psi0,theta0,verdict\n"));
    assert_eq!(text.lines().count(), 1 + 49);
    assert!(text.contains(",A\n"));
    assert!(text.contains(",divergent\n"));
}

#[test]
fn exactify_integrated_ou() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &["exactify", "--eta", "1", "--tau", "0.01", "--out", "e.json"],
        dir.path(),
    );
    let e = json(dir.path(), "e.json");
    let psi = e["exact"]["psi"].as_f64().unwrap();
    assert!((psi - (1.0 + (-0.01_f64).exp())).abs() < 1e-12);
    assert_eq!(e["fixed_point"]["class"], "D");
    assert!((e["fixed_point"]["b"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
}

#[test]
fn exactify_tau_sweep_csv() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "exactify", "--eta", "1", "--tau-sweep", "0.01,0.02,0.04", "--out", "sweep.csv",
        ],
        dir.path(),
    );
    let text = read(dir.path(), "sweep.csv");
    assert!(text.starts_with(
        "tau,psi_exact,theta_exact,alpha_exact,beta_exact,psi_euler,theta_euler,alpha_euler,beta_euler\n"
    ));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn infer_euler_shows_damping_bias() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "infer", "--scheme", "euler", "--eta", "1", "--temperature", "1", "--tau", "0.01",
            "--n", "100000", "--replicas", "4", "--seed", "5", "--out", "i.csv",
        ],
        dir.path(),
    );
    let text = read(dir.path(), "i.csv");
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("scheme,tau,n,eta_hat,eta_se,kappa_hat,"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "euler");
    let eta_hat: f64 = row[3].parse().unwrap();
    assert!((0.55..=0.8).contains(&eta_hat), "eta_hat {eta_hat}");
}

#[test]
fn infer_sweep_writes_one_row_per_tau() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "infer", "--scheme", "effective", "--eta", "1", "--temperature", "1",
            "--sweep-tau", "0.02,0.01", "--n", "50000", "--replicas", "2", "--seed", "3",
            "--out", "sweep.csv",
        ],
        dir.path(),
    );
    let text = read(dir.path(), "sweep.csv");
    assert_eq!(text.lines().count(), 3);
    // the corrected scheme centers the damping near the truth
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let eta_hat: f64 = row[3].parse().unwrap();
    assert!((0.8..=1.2).contains(&eta_hat), "eta_hat {eta_hat}");
}

#[test]
fn infer_reads_external_series() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "simulate", "--scheme", "exact", "--eta", "1", "--tau", "0.01", "--n", "50000",
            "--seed", "2", "--out", "data.csv",
        ],
        dir.path(),
    );
    run_ok(
        &[
            "infer", "--scheme", "euler", "--data", "data.csv", "--tau", "0.01", "--out",
            "fit.csv",
        ],
        dir.path(),
    );
    let text = read(dir.path(), "fit.csv");
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn experiment_labels_conjecture_check() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "experiment", "--eta", "1", "--kappa", "-1", "--lambda4", "1", "--temperature",
            "1", "--n", "5000", "--replicas", "2", "--seed", "4", "--out", "x.json",
        ],
        dir.path(),
    );
    let x = json(dir.path(), "x.json");
    assert_eq!(x["conjecture_check"], true);
    assert_eq!(x["force_params_diagnostic_only"], true);
    assert!(x["aggregate"]["eta_ratio_mean"].as_f64().unwrap() > 0.0);
    assert!(x["replicas"].as_array().unwrap().len() == 2);
}

#[test]
fn config_file_feeds_defaults_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("cfg.json"),
        r#"{"eta": 2.0, "n": 300, "scheme": "exact"}"#,
    )
    .unwrap();
    run_ok(
        &["simulate", "--config", "cfg.json", "--seed", "1", "--out", "a.csv"],
        dir.path(),
    );
    let m = json(dir.path(), "a.csv.manifest.json");
    assert_eq!(m["config"]["sde"]["eta"], 2.0);
    assert_eq!(m["config"]["n"], 300);

    run_ok(
        &[
            "simulate", "--config", "cfg.json", "--eta", "5", "--seed", "1", "--out", "b.csv",
        ],
        dir.path(),
    );
    let m = json(dir.path(), "b.csv.manifest.json");
    assert_eq!(m["config"]["sde"]["eta"], 5.0);
}

#[test]
fn exit_codes_and_error_json() {
    let dir = tempfile::tempdir().unwrap();
    // config error: invalid parameter
    let out = bin()
        .args(["simulate", "--scheme", "arma", "--mu", "-1", "--n", "10"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value =
        serde_json::from_slice(&out.stderr).expect("stderr is machine-parsable JSON");
    assert_eq!(err["error"]["kind"], "config");

    // numerical error: oscillation node of the undamped oscillator
    let out = bin()
        .args([
            "exactify", "--eta", "0", "--kappa", "4", "--tau", "1.5707963267948966",
        ])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "numerical");

    // malformed config file
    std::fs::write(dir.path().join("bad.json"), "{not json").unwrap();
    let out = bin()
        .args(["simulate", "--config", "bad.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
