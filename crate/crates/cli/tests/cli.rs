use std::process::{Command, Output};

use serde_json::Value;

fn stadion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stadion"))
        .args(args)
        .env_remove("STADION_WORKERS")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = stadion(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

#[test]
fn orbit_anchor_is_parabolic() {
    let v = json(&["orbit", "--n", "0", "--a", "1.4142135623730951", "--h", "1"]);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["tolerances"]["parabolic"].as_f64(), Some(1e-9));
    let r = &v["result"];
    assert_eq!(r["stability"]["class"]["kind"], "Parabolic");
    assert!((r["factors"]["delta"].as_f64().unwrap() - 1.0).abs() < 1e-8);
    assert!((r["factors"]["l2"].as_f64().unwrap() - 3.0 * 2f64.sqrt()).abs() < 1e-8);
    assert_eq!(r["period"], 4);
    for p in r["impacts"].as_array().unwrap() {
        assert!((p["x"].as_f64().unwrap().abs() - 2.0).abs() < 1e-8);
    }
}

#[test]
fn truncated_sqrt2_needs_a_wider_parabolic_band() {
    let args = ["orbit", "--n", "0", "--a", "1.41421356", "--h", "1"];
    let strict = json(&args);
    assert_eq!(strict["result"]["stability"]["class"]["kind"], "Hyperbolic");
    let mut wide = args.to_vec();
    wide.extend(["--tol-parabolic", "1e-8"]);
    let v = json(&wide);
    assert_eq!(v["result"]["stability"]["class"]["kind"], "Parabolic");
    assert_eq!(v["tolerances"]["parabolic"].as_f64(), Some(1e-8));
}

#[test]
fn ten_impacts_for_n3() {
    let v = json(&["orbit", "--n", "3", "--a", "1.3", "--h", "0.4"]);
    assert_eq!(v["result"]["impacts"].as_array().unwrap().len(), 10);
    assert!(v["result"]["closure_residual"].as_f64().unwrap() <= 1e-9);
}

#[test]
fn missing_orbit_exits_with_a_code() {
    let out = stadion(&["orbit", "--n", "2", "--a", "3", "--h", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "existence");
}

#[test]
fn bad_grid_is_a_usage_error() {
    let out = stadion(&["regions", "--n", "0", "--a-min", "2", "--a-max", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "usage");
    let out = stadion(&["portrait", "--a", "2", "--h", "2", "--workers", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn classify_reports_the_gap() {
    for n in 0..5 {
        let v = json(&["classify", "--n", &n.to_string(), "--a", "2", "--h", "2"]);
        assert_ne!(v["result"]["class"]["kind"], "Elliptic", "n = {n}");
    }
}

#[test]
fn region_columns_increase() {
    let (header, rows) = csv_rows(&ok(&["regions", "--n", "3", "--a-min", "1.2", "--a-max", "2.2", "--steps", "11"]));
    assert_eq!(header.first().unwrap(), "a");
    assert_eq!(header.last().unwrap(), "error");
    let mut complete = 0;
    for row in &rows {
        let hs: Vec<f64> = row[2..row.len() - 1].iter().filter(|c| !c.is_empty()).map(|c| num(c)).collect();
        assert!(hs.windows(2).all(|w| w[1] > w[0]), "{row:?}");
        if hs.len() == header.len() - 3 {
            complete += 1;
        }
    }
    assert!(complete > 0 && complete < rows.len());
    // Unreachable levels leave empty cells on the small-a rows.
    assert!(rows[0].iter().any(String::is_empty));

    let (_, rows) = csv_rows(&ok(&["regions", "--n", "0", "--a-min", "1.4142135623730951", "--a-max", "2", "--steps", "2"]));
    assert!((num(rows[0][rows[0].len() - 2].as_str()) - 1.0).abs() < 1e-8);
    let (_, rows) = csv_rows(&ok(&["regions", "--n", "1", "--a-min", "2", "--a-max", "2", "--steps", "1"]));
    assert_eq!(rows[0][1], "2.82842712");
}

#[test]
fn gap_at_a_equal_two_contains_two() {
    let (header, rows) = csv_rows(&ok(&["gaps", "--a", "2", "--n-max", "3"]));
    assert_eq!(header, ["n", "h_zero", "h_one", "h_zero_next", "gap_lo", "gap_hi", "error"]);
    assert_eq!(rows.len(), 4);
    let (lo, hi) = (num(&rows[0][4]), num(&rows[0][5]));
    assert!(lo < 2.0 && 2.0 < hi);
    assert_eq!(rows[0][5], "2.82842712");
}

#[test]
fn chaos_bound_switches_monotonically() {
    let (_, rows) = csv_rows(&ok(&["chaos-bound", "--a-min", "1.05", "--a-max", "1.4", "--steps", "50"]));
    assert_eq!(rows.len(), 50);
    let n_max: Vec<u32> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(n_max.windows(2).all(|w| w[1] >= w[0]));
    let bound: Vec<f64> = rows.iter().map(|r| num(&r[1])).collect();
    assert!(bound.windows(2).all(|w| w[1] > w[0]));
    // Outside its range the bound is a per-cell error, not a failure.
    let (_, rows) = csv_rows(&ok(&["chaos-bound", "--a-min", "1.3", "--a-max", "1.5", "--steps", "3"]));
    assert_eq!(rows[2][4], "domain");
}

#[test]
fn resonance_table() {
    let (_, rows) = csv_rows(&ok(&["resonances", "--q", "4"]));
    let cs: Vec<f64> = rows.iter().map(|r| num(&r[2])).collect();
    assert_eq!(cs.len(), 5);
    assert!(cs.windows(2).all(|w| w[1] > w[0]));
    assert!(rows.iter().all(|r| r[3].is_empty()));
    let (_, rows) = csv_rows(&ok(&["resonances", "--q", "4", "--n", "0", "--a", "1.4142135623730951"]));
    assert!(rows.iter().all(|r| !r[3].is_empty()));
}

#[test]
fn twist_point_and_scan() {
    let v = json(&["twist", "--n", "0", "--a", "1.4142135623730951", "--h", "0.5"]);
    let r = &v["result"]["report"];
    assert_eq!(r["verdict"]["kind"], "IslandCertified");
    let (tau, oracle) = (r["taus"][0].as_f64().unwrap(), r["tau1_oracle"].as_f64().unwrap());
    assert!((tau - oracle).abs() <= 0.05 * tau.abs());

    let text = ok(&["twist", "--n", "0", "--a", "1.2", "--h-min", "0.1", "--h-max", "1", "--steps", "4", "--no-oracle"]);
    let (header, rows) = csv_rows(&text);
    assert_eq!(header.len(), 11);
    assert_eq!(rows.len(), 4);
    assert!(rows[0][9].starts_with("island-certified"));
    assert_eq!(rows[3][2], "hyperbolic");
    assert_eq!(rows[3][10], "not-elliptic");
}

#[test]
fn portrait_records_every_iterate() {
    let text = ok(&["portrait", "--a", "2", "--h", "2", "--seeds", "5", "--iters", "40", "--skip", "10"]);
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["seed", "iterate", "s", "beta"]);
    assert_eq!(rows.len(), 5 * 40);
    assert_eq!(rows[0][1], "11");
    assert_eq!(rows[39][1], "50");
    assert_eq!(rows[40][0], "1");
}

#[test]
fn level_curve_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("curve.csv");
    let out = stadion(&[
        "level-curve", "--n", "0", "--c", "1", "--a-min", "1.4142135623730951", "--a-max", "2", "--steps", "3", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success() && out.stdout.is_empty());
    let (header, rows) = csv_rows(&std::fs::read_to_string(&path).unwrap());
    assert_eq!(header, ["a", "h", "error"]);
    assert!((num(&rows[0][1]) - 1.0).abs() < 1e-8);
}

#[test]
fn workers_from_the_environment() {
    let args = ["chaos-bound", "--a-min", "1.05", "--a-max", "1.4", "--steps", "20"];
    let from_env = Command::new(env!("CARGO_BIN_EXE_stadion"))
        .args(args)
        .env("STADION_WORKERS", "3")
        .output()
        .unwrap();
    assert!(from_env.status.success());
    assert_eq!(from_env.stdout, ok(&args).into_bytes());
    let bad = Command::new(env!("CARGO_BIN_EXE_stadion"))
        .args(args)
        .env("STADION_WORKERS", "0")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
