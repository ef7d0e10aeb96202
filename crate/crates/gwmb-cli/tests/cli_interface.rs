//! End-to-end checks of the `gwmb` binary: output schemas, exit codes,
//! file output, and determinism under different worker counts.

use std::process::{Command, Output};

fn gwmb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwmb"))
        .args(args)
        .env_remove("GWMB_THREADS")
        .output()
        .expect("binary runs")
}

fn gwmb_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gwmb"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout_str(out)).expect("stdout is JSON")
}

#[test]
fn solve_reports_closed_form_values_as_json() {
    let out = gwmb(&["solve", "--dist", "geo-n:0.25", "--regime", "full"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert!((v["p_unconditional"].as_f64().unwrap() - 2.0 / 3.0).abs() < 1e-10);
    assert!((v["p_bar"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-10);
    assert_eq!(v["regime"], "full_info");
    assert_eq!(v["case"], "interior");

    let out = gwmb(&["solve", "--dist", "poisson:3", "--regime", "none"]);
    let v = stdout_json(&out);
    // 12-significant-digit output shifts the value by at most half an ulp
    // of the 12th digit.
    assert!((v["p_unconditional"].as_f64().unwrap() - 0.3167644728879).abs() < 1e-11);
    assert!((v["p_bar"].as_f64().unwrap() - 0.1494544216564).abs() < 1e-11);
}

#[test]
fn scan_emits_stable_csv_without_nan() {
    let args = ["scan", "--dist", "geo-n0", "--param", "0:1:21", "--regime", "full"];
    let first = gwmb(&args);
    let second = gwmb(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout, "scan output must be bit-stable");

    let text = stdout_str(&first);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("param,p,p_bar,q,case"));
    let rows: Vec<&str> = lines.collect();
    // s = 0 is outside the family's domain and is skipped with a warning.
    assert_eq!(rows.len(), 20);
    assert!(String::from_utf8_lossy(&first.stderr).contains("skipping param 0"));
    for row in &rows {
        assert_eq!(row.split(',').count(), 5, "row '{row}'");
        assert!(!row.contains("nan") && !row.contains("NaN"), "row '{row}'");
    }
    // Above the jump the curve sits at 1.
    assert!(rows.iter().any(|r| r.starts_with("0.3,1,1,")));
}

#[test]
fn scan_verify_accepts_consistent_rows() {
    let out = gwmb(&[
        "scan", "--dist", "poisson", "--param", "2:5:13", "--regime", "none", "--verify",
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout_str(&out).lines().count(), 14);
}

#[test]
fn exit_codes_follow_the_documented_scheme() {
    let cases: &[(&[&str], i32)] = &[
        (&["solve", "--dist", "geo-n:0.25"], 0),
        (&["solve", "--dist", "bogus:1"], 2),
        (&["solve", "--dist", "geo-n:0.25", "--frobnicate"], 2),
        (&["scan", "--dist", "poisson", "--param", "5:2:10"], 2),
        (&["scan", "--dist", "poisson", "--param", "2:5:3", "--format", "json"], 2),
        (&["critical", "--dist", "poisson", "--param", "nonsense"], 2),
        (&["simulate", "--dist", "poisson:3", "--regime", "full"], 2),
        (&["simulate", "--dist", "poisson:3", "--form", "subtree"], 2),
        (&["simulate", "--dist", "poisson:3", "--trials", "0"], 2),
        // A law that does not split into two identical halves.
        (&["walk-quantities", "--dist", "pmf:0,0.5,0.25,0.25"], 3),
        // Subcritical tree: size conditioning is undefined.
        (&["simulate", "--dist", "poisson:0.9", "--regime", "size", "--trials", "10"], 3),
        (&["oracle", "--max-depth", "4"], 3),
        (&["oracle", "--max-depth", "2", "--max-branching", "2", "--reach", "2"], 0),
    ];
    for (args, want) in cases {
        let out = gwmb(args);
        assert_eq!(
            out.status.code(),
            Some(*want),
            "args {:?}, stderr: {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn out_flag_writes_the_payload_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("solution.json");
    let out = gwmb(&[
        "solve", "--dist", "geo-n:0.2", "--regime", "full", "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty(), "data must go to the file, not stdout");
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert!((v["p_unconditional"].as_f64().unwrap() - 0.3454915028125).abs() < 1e-11);
}

#[test]
fn csv_headers_are_fixed_per_command() {
    let expectations: &[(&[&str], &str)] = &[
        (
            &["walk-quantities", "--dist", "geo-n0:0.25", "--format", "csv"],
            "rho,sigma,theta,rho_odd,theta_odd,pi_minus1",
        ),
        (
            &["bounds", "--dist", "binomial:13,0.25", "--format", "csv"],
            "maker_has_chance,breaker_sure,maker_lhs,maker_rhs,breaker_lhs,breaker_rhs,p_lo,p_hi,p_bar_lo,p_bar_hi",
        ),
        (
            &["critical", "--dist", "poisson", "--regime", "full", "--param", "3:4", "--format", "csv"],
            "param_c,p_at_critical",
        ),
        (
            &["simulate", "--dist", "geo-n:0.3", "--trials", "2000", "--format", "csv"],
            "trials,successes,p_hat,ci_lo,ci_hi,bias_bound,seed",
        ),
        (
            &["solve", "--dist", "poisson:3", "--format", "csv"],
            "p,p_bar,q,case",
        ),
    ];
    for (args, header) in expectations {
        let out = gwmb(args);
        assert!(
            out.status.success(),
            "args {:?}, stderr: {}",
            args,
            String::from_utf8_lossy(&out.stderr)
        );
        let text = stdout_str(&out);
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(*header), "args {args:?}");
        assert_eq!(lines.clone().count(), 1, "one data row for {args:?}");
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), header.split(',').count());
    }
}

#[test]
fn walk_quantities_match_the_closed_form_roots() {
    let out = gwmb(&["walk-quantities", "--dist", "geo-n0:0.25"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let sqrt13 = 13f64.sqrt();
    assert!((v["rho"].as_f64().unwrap() - (1.0 + sqrt13) / 6.0).abs() < 1e-9);
    assert!((v["rho_odd"].as_f64().unwrap() - (13.0 - sqrt13) / 12.0).abs() < 1e-9);
    assert!((v["theta_odd"].as_f64().unwrap() - (5.0 + sqrt13) / 12.0).abs() < 1e-9);
    assert!((v["pi_minus1"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn simulation_output_is_invariant_under_worker_count() {
    let args =
        ["simulate", "--dist", "poisson:3", "--trials", "30000", "--seed", "99", "--form", "game"];
    let one = gwmb_env(&args, "GWMB_THREADS", "1");
    let five = gwmb_env(&args, "GWMB_THREADS", "5");
    assert!(one.status.success());
    assert_eq!(one.stdout, five.stdout, "trial streams must not depend on chunking");

    let bad = gwmb_env(&["solve", "--dist", "poisson:3"], "GWMB_THREADS", "many");
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn oracle_reports_zero_counterexamples_on_the_small_battery() {
    let out = gwmb(&["oracle", "--max-depth", "2", "--max-branching", "3", "--reach", "2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["counterexamples"].as_array().unwrap().len(), 0);
    assert_eq!(v["games"].as_u64().unwrap(), 2 * v["trees"].as_u64().unwrap());
    assert!(v["summary"].as_str().unwrap().starts_with("0 counterexamples"));
}
