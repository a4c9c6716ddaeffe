use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ftqs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftqs")).args(args).output().expect("binary runs")
}

fn run_with(dir: &Path, sub: &str, config: &str, extra: &[&str]) -> Output {
    let cfg = dir.join(format!("{sub}.json"));
    fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let mut args = vec![sub, "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    ftqs(&args)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// CSV body without the `#` header line.
fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    text.lines().filter(|l| !l.starts_with('#')).skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn help_lists_config_keys() {
    for (sub, keys) in [
        ("sample", &["n", "k", "gadget_file", "alpha", "shots"][..]),
        ("decode-bench", &["distances", "rates", "trials"]),
        ("msd-plan", &["eps", "target_eps_out", "constants"]),
        ("msd-sim", &["protocol", "eps", "stratified"]),
        ("route", &["p", "m", "flags", "branches"]),
        ("estimate", &["mode", "n", "k", "r", "constants"]),
        ("pipeline", &["mode", "eps_t", "p_f", "decode_model", "envelope_z"]),
    ] {
        let out = ftqs(&[sub, "--help"]);
        assert!(out.status.success());
        let help = String::from_utf8(out.stdout).unwrap();
        for k in keys {
            assert!(help.contains(&format!("  {k} ")), "{sub} --help misses {k}");
        }
    }
}

#[test]
fn single_wire_sample_table_sums_to_one() {
    let dir = TempDir::new().unwrap();
    let out = run_with(dir.path(), "sample", r#"{"n": 1, "k": 2, "shots": 0}"#, &[]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&dir.path().join("out/distribution.csv"));
    assert_eq!(rows.len(), 8);
    let total: f64 = rows.iter().map(|r| r[2].parse::<f64>().unwrap()).sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn sample_stats_report_beta() {
    let dir = TempDir::new().unwrap();
    let out = run_with(dir.path(), "sample", r#"{"n": 2, "k": 4, "alpha": 1, "shots": 1000}"#, &[]);
    assert!(out.status.success());
    let stats = json(&dir.path().join("out/stats.json"));
    assert!((stats["beta"].as_f64().unwrap() - 0.40625).abs() < 1e-12);
    assert_eq!(stats["config"]["n"], 2);
    assert_eq!(stats["seed"], 0);
}

#[test]
fn missing_gadget_file_exits_2_naming_the_path() {
    let dir = TempDir::new().unwrap();
    let out = run_with(dir.path(), "sample", r#"{"n": 2, "k": 2, "gadget_file": "/no/such/gadget.json"}"#, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/no/such/gadget.json"));
}

#[test]
fn config_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    assert_eq!(run_with(dir.path(), "decode-bench", r#"{"trials": 0}"#, &[]).status.code(), Some(2));
    assert_eq!(run_with(dir.path(), "decode-bench", r#"{"trial": 10}"#, &[]).status.code(), Some(2));
    assert_eq!(run_with(dir.path(), "estimate", r#"{"constants": {"c_nope": 2}}"#, &[]).status.code(), Some(2));
    assert_eq!(run_with(dir.path(), "pipeline", r#"{"mode": "exact_small", "n": 1, "k": 2, "eps_t": 0.7}"#, &[]).status.code(), Some(2));
    assert_eq!(run_with(dir.path(), "route", r#"{"p": 3, "m": 2, "flags": "100"}"#, &[]).status.code(), Some(2));
    assert_eq!(ftqs(&["estimate", "--config", "/no/such/config.json"]).status.code(), Some(2));
}

#[test]
fn aborted_pipeline_exits_3() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"mode": "exact_small", "n": 1, "k": 2, "eps_t": 0.45, "t_copies": 1, "shots": 3}"#;
    let out = run_with(dir.path(), "pipeline", cfg, &[]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn decode_bench_zero_rate_and_monotone_column() {
    let dir = TempDir::new().unwrap();
    let out = run_with(dir.path(), "decode-bench", r#"{"distances": [3, 5], "rates": [0.0, 0.01], "trials": 20000}"#, &[]);
    assert!(out.status.success());
    let rows = csv_rows(&dir.path().join("out/sweep.csv"));
    let p_l = |d: &str, p: &str| rows.iter().find(|r| r[0] == d && r[2] == p).unwrap()[4].parse::<f64>().unwrap();
    assert_eq!(p_l("3", "0"), 0.0);
    assert_eq!(p_l("5", "0"), 0.0);
    assert!(p_l("5", "0.01") < p_l("3", "0.01"));
}

#[test]
fn estimate_report_carries_formulas() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("e");
    let out = ftqs(&["estimate", "--mode", "4d", "--n", "64", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let r = json(&out_dir.join("report.json"));
    let records = r["report"]["records"].as_array().unwrap();
    assert!(!records.is_empty());
    assert!(records.iter().all(|x| x["formula"].as_str().is_some_and(|f| !f.is_empty())));
    assert_eq!(r["config"]["n"], 64.0);
}

#[test]
fn route_example_writes_plan_and_grid() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("r");
    let out = ftqs(&["route", "--p", "7", "--m", "2", "--flags", "0100100", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = fs::read_to_string(out_dir.join("plan.txt")).unwrap();
    assert!(text.contains("flags 0100100"));
    assert!(text.contains("path 0 source 1"));
    assert!(text.contains("path 1 source 4"));
    let grid: Vec<&str> = text.lines().skip_while(|l| *l != "basis").skip(1).collect();
    assert_eq!(grid.len(), 13);
    assert!(grid.iter().all(|l| l.len() == 4));
    let report = json(&out_dir.join("report.json"));
    assert_eq!(report["matched"], report["branches"]);
    assert_eq!(report["counts"]["o"], 2);
}

#[test]
fn msd_sim_small_sweep() {
    let dir = TempDir::new().unwrap();
    let out = run_with(dir.path(), "msd-sim", r#"{"protocol": "y7", "eps": [0.01, 0.02, 0.04]}"#, &[]);
    assert!(out.status.success());
    let r = json(&dir.path().join("out/report.json"));
    let slope = r["slope"].as_f64().unwrap();
    assert!((2.5..=3.5).contains(&slope), "slope {slope}");
    assert!(r["oracle"].as_array().unwrap().iter().all(|o| o["relative_error"].as_f64().unwrap() < 0.1));
}

#[test]
fn noiseless_pipeline_is_within_envelope() {
    let dir = TempDir::new().unwrap();
    let out_dir = dir.path().join("p");
    let out = ftqs(&["pipeline", "--mode", "exact_small", "--distance", "1", "--noiseless", "--shots", "4000", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out_dir.join("report.json"));
    assert_eq!(r["within_envelope"], true);
    assert_eq!(r["feedback_audit"], 1);
    assert_eq!(r["config"]["eps_t"], 0.0);
    for f in ["distribution.csv", "empirical.csv", "empirical_raw.csv", "records.jsonl", "depth.json"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
}

fn outputs(dir: &Path) -> Vec<(String, String)> {
    let mut files: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x != "jsonl"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read_to_string(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn outputs_do_not_depend_on_threads() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("sample", r#"{"n": 2, "k": 3, "shots": 3000}"#),
        ("pipeline", r#"{"mode": "exact_small", "n": 1, "k": 3, "eps_t": 0.02, "noise": {"p_prep": 0, "p_layer": [], "p_out": 0.01}, "shots": 500}"#),
        ("pipeline", r#"{"mode": "error_model", "n": 2, "k": 2, "p_f": 0.01, "eps_out": 0.01, "shots": 2000}"#),
        ("route", r#"{"p": 4, "m": 2, "flags": "1011", "branches": 16}"#),
    ];
    for (i, (sub, cfg)) in cases.iter().enumerate() {
        let cfg_path = dir.path().join(format!("c{i}.json"));
        fs::write(&cfg_path, cfg).unwrap();
        let mut seen = Vec::new();
        for threads in ["1", "8", "1"] {
            let out_dir = dir.path().join(format!("o{i}_{}", seen.len()));
            let out = ftqs(&[sub, "--config", cfg_path.to_str().unwrap(), "--seed", "11", "--threads", threads, "--out", out_dir.to_str().unwrap()]);
            assert!(out.status.success(), "{sub}: {}", String::from_utf8_lossy(&out.stderr));
            seen.push(outputs(&out_dir));
        }
        assert!(!seen[0].is_empty());
        assert_eq!(seen[0], seen[1], "{sub}: threads changed outputs");
        assert_eq!(seen[0], seen[2], "{sub}: rerun changed outputs");
        assert!(seen[0].iter().all(|(_, text)| text.contains("\"seed\":11") || text.contains("seed=11") || text.contains("\"seed\": 11")));
    }
}

#[test]
fn records_match_apart_from_timing() {
    let dir = TempDir::new().unwrap();
    let cfg = r#"{"mode": "exact_small", "n": 1, "k": 2, "eps_t": 0.02, "shots": 200}"#;
    let strip = |p: &Path| -> Vec<Value> {
        fs::read_to_string(p)
            .unwrap()
            .lines()
            .map(|l| {
                let mut v: Value = serde_json::from_str(l).unwrap();
                if let Some(o) = v.as_object_mut() {
                    o.remove("elapsed_us");
                }
                v
            })
            .collect()
    };
    let mut runs = Vec::new();
    for threads in ["1", "4"] {
        let sub = dir.path().join(threads);
        fs::create_dir_all(&sub).unwrap();
        assert!(run_with(&sub, "pipeline", cfg, &["--threads", threads]).status.success());
        runs.push(strip(&sub.join("out/records.jsonl")));
    }
    assert!(runs[0].len() > 100);
    assert_eq!(runs[0], runs[1]);
}
