//! End-to-end tests of the `vexforce` binary: exit codes, determinism,
//! output formats, and the no-partial-output guarantee.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vexforce"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("spawn vexforce")
}

fn assert_code(out: &Output, code: i32) {
    assert_eq!(
        out.status.code(),
        Some(code),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn gen_path(dir: &Path, extra: &[&str], out: &str) {
    let mut args = vec!["paths", "gen", "--seed", "11", "--out", out];
    args.extend_from_slice(extra);
    assert_code(&run_in(dir, &args), 0);
}

#[test]
fn gen_is_deterministic_and_constant_kind_is_constant() {
    let dir = tempfile::tempdir().unwrap();
    gen_path(dir.path(), &["--kind", "fbm", "--hurst", "0.4", "--points", "257"], "a.csv");
    gen_path(dir.path(), &["--kind", "fbm", "--hurst", "0.4", "--points", "257"], "b.csv");
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    assert_eq!(a, b, "same spec and seed must give byte-identical files");

    gen_path(dir.path(), &["--kind", "constant", "--points", "64"], "c.csv");
    let text = std::fs::read_to_string(dir.path().join("c.csv")).unwrap();
    let prices: Vec<&str> =
        text.lines().skip(1).map(|l| l.split(',').nth(1).unwrap()).collect();
    assert!(prices.iter().all(|&p| p == prices[0]), "constant path must repeat one price");
}

#[test]
fn multi_seed_requires_placeholder_and_expands_it() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["paths", "gen", "--kind", "constant", "--points", "8", "--seed", "1", "2",
          "--out", "p.csv"],
    );
    assert_code(&out, 1);
    assert!(!dir.path().join("p.csv").exists(), "failed command must not leave files");

    let out = run_in(
        dir.path(),
        &["paths", "gen", "--kind", "constant", "--points", "8", "--seed", "1", "2",
          "--out", "p_{seed}.csv"],
    );
    assert_code(&out, 0);
    assert!(dir.path().join("p_1.csv").exists());
    assert!(dir.path().join("p_2.csv").exists());
}

#[test]
fn unknown_kind_and_bad_flags_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["paths", "gen", "--kind", "brownian-bridge", "--seed", "1", "--out", "x.csv"],
    );
    assert_code(&out, 1);
    let out = run_in(dir.path(), &["game", "run", "--path", "x.csv"]);
    assert_code(&out, 1); // missing required flags is a usage error
}

#[test]
fn missing_input_file_exits_two_without_partial_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        &["game", "run", "--path", "nope.csv", "--delta1", "0.1", "--delta2", "0.1",
          "--out", "r.json"],
    );
    assert_code(&out, 2);
    assert!(!dir.path().join("r.json").exists());
}

#[test]
fn malformed_path_file_exits_one_with_line_number() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.csv"), "time,price\n0,1.0\n0.5,-2.0\n").unwrap();
    let out = run_in(
        dir.path(),
        &["game", "run", "--path", "bad.csv", "--delta1", "0.1", "--delta2", "0.1",
          "--out", "r.json"],
    );
    assert_code(&out, 1);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 3"), "stderr should cite the offending line: {stderr}");
    assert!(!dir.path().join("r.json").exists());
}

/// Closed-form oracle for the log-linear game: slope 1, symmetric
/// eta = 1/8 over [0, 1] gives exactly 8 up-crossings at t = i/8.
#[test]
fn log_linear_game_report_matches_crossing_oracle() {
    let dir = tempfile::tempdir().unwrap();
    gen_path(
        dir.path(),
        &["--kind", "log-linear", "--slope", "1.0", "--points", "4097"],
        "lin.csv",
    );
    let delta = format!("{}", (0.125f64).exp_m1());
    let out = run_in(
        dir.path(),
        &["game", "run", "--path", "lin.csv", "--delta1", &delta, "--delta2", &delta,
          "--out", "r.json", "--hits-out", "h.csv"],
    );
    assert_code(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap())
            .unwrap();
    assert_eq!(report["summary"]["n_star"], 8);
    assert_eq!(report["summary"]["heads"], 8);

    let hits = std::fs::read_to_string(dir.path().join("h.csv")).unwrap();
    let mut lines = hits.lines();
    assert_eq!(lines.next().unwrap(), "round,time,outcome,log_price");
    for (i, line) in lines.enumerate() {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 4);
        assert_eq!(cols[0], format!("{}", i + 1));
        let t: f64 = cols[1].parse().unwrap();
        assert!((t - (i + 1) as f64 / 8.0).abs() < 1e-12, "hit {i} at {t}");
        assert_eq!(cols[2], "1");
    }
}

#[test]
fn constant_game_report_is_trivial() {
    let dir = tempfile::tempdir().unwrap();
    gen_path(dir.path(), &["--kind", "constant", "--points", "64"], "c.csv");
    let out = run_in(
        dir.path(),
        &["game", "run", "--path", "c.csv", "--delta1", "0.1", "--delta2", "0.2",
          "--out", "r.json"],
    );
    assert_code(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.json")).unwrap())
            .unwrap();
    assert_eq!(report["summary"]["n_star"], 0);
    assert_eq!(report["log_horizon_capital"], 0.0);
}

#[test]
fn sweep_reports_are_deterministic_and_seed_order_independent() {
    let dir = tempfile::tempdir().unwrap();
    let base = &["sweep", "--hurst", "0.5", "--points", "4097", "--kmin", "2", "--kmax", "3"];
    let mut args1: Vec<&str> = base.to_vec();
    args1.extend_from_slice(&["--seed-list", "5,3,9", "--records-out", "rec1.csv",
                              "--out", "s1.json"]);
    let mut args2: Vec<&str> = base.to_vec();
    args2.extend_from_slice(&["--seed-list", "9,5,3", "--records-out", "rec2.csv",
                              "--out", "s2.json"]);
    assert_code(&run_in(dir.path(), &args1), 0);
    assert_code(&run_in(dir.path(), &args2), 0);
    let s1 = std::fs::read(dir.path().join("s1.json")).unwrap();
    let s2 = std::fs::read(dir.path().join("s2.json")).unwrap();
    assert_eq!(s1, s2, "permuting the seed list must not change the report");
    let r1 = std::fs::read(dir.path().join("rec1.csv")).unwrap();
    let r2 = std::fs::read(dir.path().join("rec2.csv")).unwrap();
    assert_eq!(r1, r2);
    let header = String::from_utf8(r1).unwrap();
    assert!(header.starts_with("k,n_star,h,t,TV,L,sigma,p,logK_exact,logK_eq12,logK_regime\n"));
}

#[test]
fn sweep_config_file_is_read_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("sweep.toml"),
        "[path]\nhurst = [0.5]\npoints = 4097\n\n[grid]\nk_min = 2\nk_max = 2\n\n\
         [seeds]\nbase = 1\ncount = 2\n\n[output]\nreport = \"cfg.json\"\n",
    )
    .unwrap();
    assert_code(&run_in(dir.path(), &["sweep", "--config", "sweep.toml"]), 0);
    let from_cfg: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("cfg.json")).unwrap())
            .unwrap();
    assert_eq!(from_cfg["config"]["k_min"], 2);
    assert_eq!(from_cfg["provenance"]["seeds"], serde_json::json!([1, 2]));

    // A flag overrides the file value.
    assert_code(
        &run_in(dir.path(), &["sweep", "--config", "sweep.toml", "--kmin", "3", "--kmax", "3",
                              "--out", "flag.json"]),
        0,
    );
    let from_flag: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("flag.json")).unwrap())
            .unwrap();
    assert_eq!(from_flag["config"]["k_min"], 3);
    assert_ne!(from_cfg["provenance"]["config_hash"], from_flag["provenance"]["config_hash"]);
}

#[test]
fn force_run_constant_path_freezes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    gen_path(dir.path(), &["--kind", "constant", "--points", "64"], "c.csv");
    let out = run_in(
        dir.path(),
        &["force", "run", "--path", "c.csv", "--kmin", "2", "--kmax", "4", "--out", "f.json"],
    );
    assert_code(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("f.json")).unwrap())
            .unwrap();
    assert_eq!(report["ladder"]["frozen_count"], 0);
    assert_eq!(report["ladder"]["target_reached"], false);
    assert!(report["two_account"]["band_exit"].is_null());
}

#[test]
fn analyze_reports_brownian_roughness() {
    let dir = tempfile::tempdir().unwrap();
    gen_path(dir.path(), &["--kind", "fbm", "--hurst", "0.5", "--points", "65537"], "w.csv");
    let out = run_in(dir.path(), &["analyze", "--path", "w.csv", "--out", "a.json"]);
    assert_code(&out, 0);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a.json")).unwrap())
            .unwrap();
    let vex = report["variation"]["vex"].as_f64().unwrap();
    assert!((1.6..=2.4).contains(&vex), "vex = {vex}");
}
