//! End-to-end tests driving the compiled binary.

use std::path::Path;
use std::process::{Command, Output};

fn rdb() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rdb"));
    c.env_remove("RDB_SEED");
    c.env_remove("RDB_WORKERS");
    c
}

fn run_ok(args: &[&str]) -> Output {
    let out = rdb().args(args).output().expect("spawn rdb");
    assert!(
        out.status.success(),
        "rdb {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn run_writes_one_row_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("point");
    let args = [
        "run",
        "--scheme",
        "single-beam",
        "--M",
        "1000",
        "--q",
        "0.8",
        "--trials",
        "100",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ];
    run_ok(&args);
    let csv1 = std::fs::read(out.with_extension("csv")).unwrap();
    let text = String::from_utf8(csv1.clone()).unwrap();
    assert_eq!(text.lines().count(), 2, "header plus one data row");
    assert!(text
        .lines()
        .next()
        .unwrap()
        .starts_with("label,scheme,gain"));

    run_ok(&args);
    let csv2 = std::fs::read(out.with_extension("csv")).unwrap();
    assert_eq!(csv1, csv2, "identical command gives identical bytes");

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(summary["master_seed"], 7);
    assert_eq!(summary["per_point_trials"], 100);
    assert!(summary["tool_version"].is_string());
    assert!(summary["resolved_config"]["m_values"].is_array());
}

#[test]
fn run_rejects_out_of_range_q_without_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad");
    let status = rdb()
        .args([
            "run",
            "--scheme",
            "single-beam",
            "--M",
            "100",
            "--q",
            "1.5",
            "--trials",
            "10",
            "--seed",
            "1",
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(!status.status.success());
    assert!(String::from_utf8_lossy(&status.stderr).contains("q must lie in"));
    assert!(!out.with_extension("csv").exists());
    assert!(!out.with_extension("json").exists());
}

#[test]
fn figure_preset_row_count_and_worker_invariance() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for (path, workers) in [(&a, "1"), (&b, "4")] {
        run_ok(&[
            "figure",
            "fig3a",
            "--trials",
            "25",
            "--seed",
            "3",
            "--max-m",
            "500",
            "--workers",
            workers,
            "--out",
            path.to_str().unwrap(),
        ]);
    }
    let csv_a = std::fs::read(a.with_extension("csv")).unwrap();
    let csv_b = std::fs::read(b.with_extension("csv")).unwrap();
    assert_eq!(csv_a, csv_b, "worker count must not change the table");
    let text = String::from_utf8(csv_a).unwrap();
    // 19 q values x 2 antenna counts (100, 500) plus header
    assert_eq!(text.lines().count(), 19 * 2 + 1);
    assert!(text.contains("ratio"));

    let status = rdb().args(["figure", "fig9z"]).output().unwrap();
    assert!(!status.status.success());
}

#[test]
fn validate_reports_json_and_exit_status() {
    let out = rdb()
        .args(["validate", "kernel", "--budget", "0.02", "--seed", "5"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let report: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["suite"], "kernel");
    assert_eq!(report["passed"], true);
    assert!(report["checks"].as_array().unwrap().len() >= 4);

    let bad = rdb().args(["validate", "not-a-suite"]).output().unwrap();
    assert!(!bad.status.success());
}

#[test]
fn theory_fro_prints_expected_values() {
    let out = run_ok(&["theory", "fro", "--q", "0.25,0.5,0.75"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(rows[0].contains("-0.5") && rows[0].contains("0"));
    assert!(rows[2].contains("0.5"));

    let bad = rdb()
        .args(["theory", "lemma1", "--M", "100", "--p", "2.0"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
}

#[test]
fn env_seed_applies_and_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let by_env = dir.path().join("env");
    let by_flag = dir.path().join("flag");
    let mut cmd = rdb();
    cmd.env("RDB_SEED", "99").args([
        "run",
        "--scheme",
        "single-beam",
        "--M",
        "200",
        "--q",
        "0.5",
        "--trials",
        "50",
        "--out",
        by_env.to_str().unwrap(),
    ]);
    assert!(cmd.output().unwrap().status.success());
    let env_summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(by_env.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(env_summary["master_seed"], 99);

    let config = dir.path().join("exp.toml");
    std::fs::write(&config, "trials = 40\nseed = 11\ngain = \"unit\"\n").unwrap();
    run_ok(&[
        "run",
        "--scheme",
        "single-beam",
        "--M",
        "200",
        "--q",
        "0.5",
        "--config",
        config.to_str().unwrap(),
        "--seed",
        "12",
        "--out",
        by_flag.to_str().unwrap(),
    ]);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(by_flag.with_extension("json")).unwrap())
            .unwrap();
    // flag beats config; config fills what flags left unset
    assert_eq!(summary["master_seed"], 12);
    assert_eq!(summary["per_point_trials"], 40);
    assert_eq!(summary["resolved_config"]["gain"], "unit-gain");
}

#[test]
fn bits_flag_rescales_rate_columns_only() {
    let dir = tempfile::tempdir().unwrap();
    let nats = dir.path().join("nats");
    let bits = dir.path().join("bits");
    let base = [
        "run",
        "--scheme",
        "single-beam",
        "--M",
        "300",
        "--q",
        "0.7",
        "--trials",
        "60",
        "--seed",
        "2",
        "--ratio",
    ];
    run_ok(&[&base[..], &["--out", nats.to_str().unwrap()]].concat());
    run_ok(&[&base[..], &["--bits", "--out", bits.to_str().unwrap()]].concat());
    let parse = |p: &Path| -> Vec<String> {
        let text = std::fs::read_to_string(p).unwrap();
        text.lines()
            .nth(1)
            .unwrap()
            .split(',')
            .map(str::to_string)
            .collect()
    };
    let a = parse(&nats.with_extension("csv"));
    let b = parse(&bits.with_extension("csv"));
    let idx_rate = 11;
    let idx_ratio = 13;
    let ra: f64 = a[idx_rate].parse().unwrap();
    let rb: f64 = b[idx_rate].parse().unwrap();
    assert!((rb - ra / std::f64::consts::LN_2).abs() < 1e-12);
    assert_eq!(a[idx_ratio], b[idx_ratio], "ratio column is base-invariant");
    assert!(a.contains(&"nats".to_string()));
    assert!(b.contains(&"bits".to_string()));
}

#[test]
fn all_presets_smoke_tier_under_a_minute() {
    let dir = tempfile::tempdir().unwrap();
    let t0 = std::time::Instant::now();
    for id in [
        "fig3a", "fig3b", "fig4a", "fig4b", "fig5a", "fig5b", "fig6a", "fig6b",
    ] {
        let out = dir.path().join(id);
        run_ok(&[
            "figure",
            id,
            "--trials",
            "200",
            "--max-m",
            "1000",
            "--seed",
            "8",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(out.with_extension("csv").exists());
    }
    let secs = t0.elapsed().as_secs_f64();
    assert!(secs < 60.0, "smoke tier took {secs:.1} s");
}

#[test]
fn rbf_run_defaults_beams_to_antennas() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("rbf");
    run_ok(&[
        "run",
        "--scheme",
        "rbf",
        "--M",
        "16",
        "--K",
        "32",
        "--trials",
        "40",
        "--seed",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    let text = std::fs::read_to_string(out.with_extension("csv")).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[5], "16"); // m
    assert_eq!(row[8], "32"); // k
    assert_eq!(row[9], "16"); // s follows the antenna count
}
