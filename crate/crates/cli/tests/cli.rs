use std::process::{Command, Output};

fn gkpkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gkpkit"))
        .args(args)
        .output()
        .expect("spawn gkpkit")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn parse_csv(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_string).collect();
    let rows = lines
        .map(|l| l.split(',').map(|c| c.parse::<f64>().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn wavefunction_default_grid() {
    let out = gkpkit(&["wavefunction", "--symmetric", "--db", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 602);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["x", "re", "im"]);
    let first = rows.first().unwrap()[0];
    let last = rows.last().unwrap()[0];
    assert!((first + last).abs() < 1e-12);
    assert!(rows.iter().all(|r| r[2] == 0.0));
}

#[test]
fn momentum_of_even_state_is_real() {
    let out = gkpkit(&["wavefunction", "--symmetric", "--sigma2", "0.08", "--basis", "momentum", "--points", "41"]);
    assert!(out.status.success());
    let (_, rows) = parse_csv(&stdout(&out));
    assert_eq!(rows.len(), 41);
    assert!(rows.iter().all(|r| r[2].abs() < 1e-14));
}

#[test]
fn wigner_default_grid_is_q_major() {
    let out = gkpkit(&["wigner", "--symmetric", "--db", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 40402);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["q", "p", "re", "im"]);
    assert_eq!(rows[0][0], rows[200][0]);
    assert!(rows[201][0] > rows[0][0]);
}

#[test]
fn outputs_are_byte_identical() {
    let args = ["wigner", "--standard", "--sigma-q2", "0.07", "--sigma-p2", "0.1", "--gamma-spacing", "2.3", "--d", "3", "--j", "1", "--j-prime", "2", "--nq", "31", "--np", "17"];
    let a = gkpkit(&args);
    let b = gkpkit(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["sweep", "--quantity", "photon", "--db-min", "6", "--db-max", "12", "--db-steps", "7"];
    let one = Command::new(env!("CARGO_BIN_EXE_gkpkit")).args(args).env("GKPKIT_THREADS", "1").output().unwrap();
    let many = Command::new(env!("CARGO_BIN_EXE_gkpkit")).args(args).env("GKPKIT_THREADS", "4").output().unwrap();
    assert_eq!(one.stdout, many.stdout);
}

#[test]
fn sweep_two_points() {
    let out = gkpkit(&["sweep", "--quantity", "normalization", "--db-min", "8", "--db-max", "15", "--db-steps", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    let (header, rows) = parse_csv(&text);
    assert_eq!(header, ["db", "sigma2", "value", "estimate"]);
    assert_eq!(rows[1][0], 15.0);
    assert!((rows[1][2] / rows[1][3] - 1.0).abs() < 1e-3);
}

#[test]
fn overlap_sweep_is_monotone() {
    let out = gkpkit(&["sweep", "--quantity", "overlap", "--d", "3", "--db-min", "5", "--db-max", "15", "--db-steps", "11"]);
    assert!(out.status.success());
    let (_, rows) = parse_csv(&stdout(&out));
    assert!(rows.windows(2).all(|w| w[1][2] > w[0][2]));
}

#[test]
fn json_rows_match_csv() {
    let base = ["sweep", "--quantity", "photon", "--db-min", "6", "--db-max", "10", "--db-steps", "3"];
    let csv = gkpkit(&base);
    let json = gkpkit(&[&base[..], &["--format", "json"]].concat());
    let (_, rows) = parse_csv(&stdout(&csv));
    let parsed: Vec<serde_json::Value> = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(parsed.len(), rows.len());
    for (obj, row) in parsed.iter().zip(&rows) {
        let v = obj["value"].as_f64().unwrap();
        assert!((v - row[2]).abs() <= 1e-15 * v.abs());
    }
}

#[test]
fn convert_approx3() {
    let out = gkpkit(&["convert", "--approx3", "--beta", "0.2"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let s2 = v["standard"]["sigma_q2"].as_f64().unwrap();
    assert!((s2 - 0.5 * 0.2f64.tanh()).abs() < 1e-15);
    let t = &v["theorem1"];
    assert!((t["kappa"].as_f64().unwrap().powi(2) - 0.2f64.tanh()).abs() < 1e-14);
    assert!((t["gamma"].as_f64().unwrap() - t["delta"].as_f64().unwrap()).abs() < 1e-15);
}

#[test]
fn convert_db_to_sigma2() {
    let out = gkpkit(&["convert", "--symmetric", "--db", "10", "--format", "csv"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let line = text.lines().find(|l| l.starts_with("standard.sigma_q2,")).unwrap();
    let s2: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
    assert!((s2 - 0.05).abs() < 1e-15);
}

#[test]
fn out_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("psi.csv");
    let args = ["wavefunction", "--approx2", "--gamma", "0.4", "--delta", "0.5", "--points", "11"];
    let direct = gkpkit(&args);
    let to_file = gkpkit(&[&args[..], &["--out", path.to_str().unwrap()]].concat());
    assert!(to_file.status.success());
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn validation_errors_exit_2() {
    let out = gkpkit(&["convert", "--approx2", "--gamma", "2", "--delta", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("gamma*delta"));
    assert_eq!(gkpkit(&["wigner"]).status.code(), Some(2));
    assert_eq!(gkpkit(&["convert", "--approx1", "--kappa", "0.3"]).status.code(), Some(2));
    assert_eq!(gkpkit(&["convert", "--symmetric", "--sigma2", "0.6"]).status.code(), Some(2));
    assert_eq!(gkpkit(&["convert", "--symmetric", "--db", "10", "--j", "2"]).status.code(), Some(2));
    assert_eq!(gkpkit(&["sweep", "--quantity", "photon", "--db-min", "5", "--db-max", "8", "--db-steps", "1"]).status.code(), Some(2));
    assert_eq!(gkpkit(&["selftest", "--only", "nope"]).status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_3() {
    let out = gkpkit(&["--out", "/nonexistent-dir/x.csv", "wavefunction", "--symmetric", "--db", "10"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn selftest_subset_report() {
    let out = gkpkit(&["selftest", "--only", "theta"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.len(), 3);
    for c in &report {
        assert_eq!(c["group"], "theta");
        assert_eq!(c["pass"], true);
        assert!(c["residual"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn injected_tolerance_fails() {
    let out = gkpkit(&["selftest", "--only", "theta,params", "--tol", "1e-20"]);
    assert_eq!(out.status.code(), Some(1));
    let report: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.len(), 5);
    assert!(report.iter().all(|c| c["pass"] == false));
}
