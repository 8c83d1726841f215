//! End-to-end tests of the binary: output schemas, determinism, config
//! handling, exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn fibercap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibercap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn sweep_csv_schema_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |path: &Path| {
        vec![
            "sweep".to_string(),
            "--d-min=1".into(),
            "--d-max=500".into(),
            "--points=50".into(),
            "--p-dc=0".into(),
            "--p-dc=1e-3".into(),
            "--clock-hz=1e9".into(),
            "--seed=9".into(),
            format!("--out={}", path.display()),
        ]
    };
    let run_a = fibercap(&args(&a).iter().map(String::as_str).collect::<Vec<_>>());
    assert!(run_a.status.success(), "{}", stderr(&run_a));
    let run_b = fibercap(&args(&b).iter().map(String::as_str).collect::<Vec<_>>());
    assert!(run_b.status.success());

    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(
        bytes_a, bytes_b,
        "re-running an identical sweep must be byte-identical"
    );

    let text = String::from_utf8(bytes_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "d_km,eta,p,eta_prime,lower_ebits,upper_ebits,rate_per_s"
    );
    assert_eq!(text.lines().count(), 1 + 2 * 50);
    // 12 significant digits: mantissa with 11 decimals.
    let first_field = text.lines().nth(1).unwrap().split(',').next().unwrap();
    assert_eq!(first_field, "1.00000000000e0");
}

#[test]
fn sweep_json_format() {
    let out = fibercap(&[
        "sweep",
        "--d-min=1",
        "--d-max=10",
        "--points=4",
        "--format=json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].get("upper_ebits").is_some());
    assert!(rows[0]["rate_per_s"].is_null());
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fig.cfg");
    std::fs::write(
        &cfg,
        "alpha = 0.2\ndelta-nu = 100\nd-pmd = 0.1\nregime = dephase\n\
         p-dc = 0\nd-min = 50\nd-max = 150\npoints = 3\nclock-hz = 1e9\n",
    )
    .unwrap();
    let out = fibercap(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    // Middle row of [50, 150] with 3 points is the 100 km anchor.
    let mid = text.lines().nth(2).unwrap();
    assert!(mid.starts_with("1.00000000000e2,"), "{mid}");
    let rate: f64 = mid.split(',').next_back().unwrap().parse().unwrap();
    assert!((rate - 5.6498e6).abs() < 1e3, "{rate}");

    // A flag overrides the file: 4 points instead of 3.
    let out = fibercap(&["sweep", "--config", cfg.to_str().unwrap(), "--points=4"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 5);
}

#[test]
fn config_errors_are_line_numbered() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "alpha = 0.2\nmystery = 1\n").unwrap();
    let out = fibercap(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(
        err.contains("bad.cfg:2") && err.contains("mystery"),
        "{err}"
    );
}

#[test]
fn threshold_values() {
    let out = fibercap(&["threshold", "--regime=depol", "--p-inf=1", "--L=0.05"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("0.054930614"), "{text}");

    let out = fibercap(&["threshold", "--p-dc=0", "--p-dc=1e-2", "--format=json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = v.as_array().unwrap();
    assert!(rows[0]["max_distance_km"].is_null()); // dephasing, no dark counts
    let d = rows[1]["max_distance_km"].as_f64().unwrap();
    assert!((d - 110.451794).abs() < 1e-3, "{d}");
}

#[test]
fn show_channel_reports_the_anchor_point() {
    let out = fibercap(&["show-channel", "100", "--p-dc=0", "--clock-hz=1e9"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("upper_ebits   = 5.649816798131e-3"), "{text}");
    assert!(text.contains("exact         = true"), "{text}");

    let out = fibercap(&["show-channel", "100", "--p-dc=1e-3", "--format=json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let pt = &v.as_array().unwrap()[0];
    assert!((pt["eta_prime"].as_f64().unwrap() - 0.01099).abs() < 1e-12);
    assert!(!pt["exact"].as_bool().unwrap());
}

#[test]
fn verify_passes_and_reports_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let r1 = dir.path().join("r1.json");
    let r2 = dir.path().join("r2.json");
    for path in [&r1, &r2] {
        let out = fibercap(&[
            "verify",
            "--trials=20000",
            "--seed=5",
            "--d-min=5",
            "--d-max=60",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        assert!(stdout(&out).contains("verify: PASS"));
    }
    assert_eq!(std::fs::read(&r1).unwrap(), std::fs::read(&r2).unwrap());
    let report: serde_json::Value = serde_json::from_slice(&std::fs::read(&r1).unwrap()).unwrap();
    assert!(report["pass"].as_bool().unwrap());
    assert_eq!(report["points"].as_array().unwrap().len(), 3);
}

#[test]
fn corrupted_transmissivity_exits_with_verification_failure() {
    let out = fibercap(&[
        "verify",
        "--trials=20000",
        "--seed=5",
        "--d-min=5",
        "--d-max=60",
        "--inject-eta-bias=0.05",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(
        err.contains("click-rate"),
        "failure must name the click-rate check: {err}"
    );
}

#[test]
fn invalid_inputs_exit_1() {
    let out = fibercap(&["sweep", "--d-min=10", "--d-max=5"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fibercap(&["sweep", "--alpha=-0.2"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fibercap(&["verify", "--trials=10"]);
    assert_eq!(out.status.code(), Some(1));
    let out = fibercap(&["sweep", "--alpha=junk"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_3() {
    let out = fibercap(&["sweep", "--points=3", "--out=/nonexistent-dir/x.csv"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn log_scale_grid() {
    let out = fibercap(&[
        "sweep",
        "--d-min=1",
        "--d-max=100",
        "--points=3",
        "--log-scale",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mid: f64 = text
        .lines()
        .nth(2)
        .unwrap()
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap();
    assert!((mid - 10.0).abs() < 1e-9, "geometric midpoint, got {mid}");
}
