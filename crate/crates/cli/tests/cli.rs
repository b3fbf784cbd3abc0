use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use adam3_cli::config::{ExperimentConfig, GameConfig};
use adam3_cli::output::TRACE_HEADER;
use adam3_cli::sweep::sweep;
use adam3_core::HyperParams64;
use tempfile::TempDir;

fn adam3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adam3"))
        .args(args)
        .env_remove("ADAM3_OUT_DIR")
        .output()
        .expect("spawn adam3")
}

fn small_config(dir: &Path, n: u64, stride: u64) -> std::path::PathBuf {
    let cfg = ExperimentConfig {
        game: GameConfig::Quadratic { c: 1010.0, k: 0.01 },
        hp: HyperParams64 { n_iters: n, ..HyperParams64::synthetic(1010.0) },
        trace_stride: stride,
        ..Default::default()
    };
    let path = dir.join("config.json");
    fs::write(&path, cfg.to_json()).unwrap();
    path
}

#[test]
fn run_writes_trace_and_metadata() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), 500, 10);
    let out = tmp.path().join("out");
    let res = adam3(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--plot"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));

    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(!csv.contains('\r'));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(TRACE_HEADER));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 50);
    assert_eq!(rows[0][0], 10.0);
    assert_eq!(rows[49][0], 500.0);
    // Every value field carries 17 significant digits.
    let first = csv.lines().nth(1).unwrap();
    for field in first.split(',').skip(1) {
        let mantissa = field.split('e').next().unwrap().replace(['-', '.'], "");
        assert_eq!(mantissa.len(), 17, "{field}");
    }
    for r in &rows {
        assert!(r[1] >= 0.0 && r[2] >= 0.0 && r[3] >= 0.0);
    }

    let meta = fs::read_to_string(out.join("run.meta.json")).unwrap();
    let back = ExperimentConfig::from_json(&meta).unwrap();
    let original = ExperimentConfig::load(&cfg).unwrap();
    assert_eq!(back.hp, original.hp);
    assert_eq!(back.game, original.game);
    assert_eq!(back.seed, original.seed);
    assert!(fs::read_to_string(out.join("plot.svg")).unwrap().starts_with("<svg"));
}

#[test]
fn stride_equal_to_horizon_gives_one_row() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), 300, 300);
    let out = tmp.path().join("o");
    assert!(adam3(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.success());
    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    assert!(csv.lines().nth(1).unwrap().starts_with("300,"));
}

#[test]
fn env_var_overrides_config_directory() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), 20, 10);
    let target = tmp.path().join("from-env");
    let res = Command::new(env!("CARGO_BIN_EXE_adam3"))
        .args(["run", cfg.to_str().unwrap()])
        .current_dir(tmp.path())
        .env("ADAM3_OUT_DIR", &target)
        .output()
        .unwrap();
    assert!(res.status.success());
    assert!(target.join("trace.csv").exists());
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn malformed_config_exits_2_and_writes_nothing() {
    let tmp = TempDir::new().unwrap();
    let cfg = tmp.path().join("bad.json");
    fs::write(&cfg, "{\n  \"seed\": 1,\n  \"hp\": { \"eta\": }\n}\n").unwrap();
    let out = tmp.path().join("out");
    let res = adam3(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 3"));
    assert!(!out.exists());

    fs::write(&cfg, r#"{"hp": {"eta": -1.0}}"#).unwrap();
    let res = adam3(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(2));
    assert!(!out.exists());

    fs::write(&cfg, r#"{"bogus": 1}"#).unwrap();
    assert_eq!(adam3(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn missing_config_file_exits_4() {
    let res = adam3(&["run", "/nonexistent/adam3/config.json"]);
    assert_eq!(res.status.code(), Some(4));
}

#[test]
fn divergent_run_exits_3_with_partial_trace() {
    let tmp = TempDir::new().unwrap();
    let cfg = ExperimentConfig {
        hp: HyperParams64 { eta: 1e308, n_iters: 100, ..HyperParams64::synthetic(1010.0) },
        trace_stride: 1,
        ..Default::default()
    };
    let path = tmp.path().join("c.json");
    fs::write(&path, cfg.to_json()).unwrap();
    let out = tmp.path().join("out");
    let res = adam3(&["run", path.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3), "{}", String::from_utf8_lossy(&res.stderr));
    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(csv.starts_with(TRACE_HEADER));
}

#[test]
fn theory_reports_values_and_infeasibility() {
    let res = adam3(&["theory", "--json"]);
    assert!(res.status.success());
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert!((v["eta_max"].as_f64().unwrap() - 0.133631).abs() < 5e-7);
    assert!((v["beta1_1_max"].as_f64().unwrap() - 0.062631).abs() < 5e-7);
    assert_eq!(v["n_min"].as_u64(), Some(300));

    let res = adam3(&["theory", "--g0", "2", "--g-inf", "1"]);
    assert_eq!(res.status.code(), Some(5));
    let res = adam3(&["theory", "--beta1-1", "0.95", "--beta2", "0.9"]);
    assert_eq!(res.status.code(), Some(5));
}

#[test]
fn gradcheck_and_audit_commands() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), 200, 10);
    let res = adam3(&["gradcheck", cfg.to_str().unwrap(), "--random", "5"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let res = adam3(&["gradcheck", cfg.to_str().unwrap(), "--point", "1,1", "--point", "-3,2"]);
    assert!(res.status.success());

    let res = adam3(&["audit", cfg.to_str().unwrap(), "--json"]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let v: serde_json::Value = serde_json::from_slice(&res.stdout).unwrap();
    assert!(v["checks"].as_array().unwrap().len() >= 6);
}

#[test]
fn csv_running_average_matches_recomputation() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), 400, 1);
    let out = tmp.path().join("out");
    assert!(adam3(&["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]).status.success());
    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    let mut sum = 0.0;
    for (i, line) in csv.lines().skip(1).enumerate() {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        sum += f[2];
        let expect = sum / (i + 1) as f64;
        assert!((f[3] - expect).abs() <= 1e-10 * expect.max(f64::MIN_POSITIVE));
    }
}

#[test]
fn bilinear_sweep_is_batch_independent() {
    let base = ExperimentConfig {
        game: GameConfig::Bilinear { scale: 1.0 },
        hp: HyperParams64 { n_iters: 2000, ..HyperParams64::synthetic(1.0) },
        ..Default::default()
    };
    let s = sweep(&base, &[1, 4, 16], &[1, 2]).unwrap();
    let first = s.medians[0].1;
    for (_, m) in &s.medians {
        assert!((m - first).abs() < 1e-12);
    }
}

#[test]
fn sweep_command_writes_both_tables() {
    let tmp = TempDir::new().unwrap();
    let cfg = small_config(tmp.path(), 100, 100);
    let out = tmp.path().join("s");
    let res = adam3(&["sweep", cfg.to_str().unwrap(), "--batch-sizes", "1,2", "--seeds", "1,2,3", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "{}", String::from_utf8_lossy(&res.stderr));
    let rows = fs::read_to_string(out.join("sweep.csv")).unwrap();
    assert_eq!(rows.lines().count(), 7);
    let summary = fs::read_to_string(out.join("sweep_summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 3);
}
