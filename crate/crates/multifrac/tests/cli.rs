//! End-to-end tests of the `multifrac` binary: flags, file formats, exit
//! codes and reproducibility of the JSON/CSV artifacts.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_multifrac"))
}

fn run_ok(args: &[&str], dir: &Path) -> Output {
    let out = bin().args(args).current_dir(dir).output().expect("binary runs");
    assert!(
        out.status.success(),
        "command {args:?} failed with {:?}\nstdout: {}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn simulate_writes_expected_csv_shape() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "simulate",
            "--process",
            "ext",
            "--K",
            "0.7",
            "--hurst",
            "sine:mu=0.3,nu=0.7,period=1,phase=0",
            "--grid",
            "0:1:256",
            "--paths",
            "100",
            "--seed",
            "42",
            "--out",
            "paths.csv",
        ],
        dir.path(),
    );
    let text = std::fs::read_to_string(dir.path().join("paths.csv")).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    let cols: Vec<&str> = header.split(',').collect();
    assert_eq!(cols.len(), 101, "t plus 100 path columns");
    assert_eq!(cols[0], "t");
    assert_eq!(cols[1], "path_0");
    assert_eq!(cols[100], "path_99");
    // grid 0:1:256 means 257 inclusive points -> 257 data rows
    assert_eq!(lines.clone().count(), 257);
    // the t = 0 row is pinned to zero for every path
    let first = lines.next().unwrap();
    for v in first.split(',').skip(1) {
        assert_eq!(v.parse::<f64>().unwrap(), 0.0);
    }
    assert!(!text.contains('\r'), "LF line endings only");
}

#[test]
fn simulate_is_byte_identical_across_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str, threads: &str| {
        vec![
            "simulate".to_string(),
            "--process".into(),
            "bfbm".into(),
            "--H".into(),
            "0.7".into(),
            "--K".into(),
            "0.8".into(),
            "--grid".into(),
            "0:2:128".into(),
            "--paths".into(),
            "50".into(),
            "--seed".into(),
            "9".into(),
            "--threads".into(),
            threads.into(),
            "--out".into(),
            out.into(),
        ]
    };
    for (out, threads) in [("a.csv", "1"), ("b.csv", "8"), ("c.csv", "1")] {
        let argv = args(out, threads);
        let argv: Vec<&str> = argv.iter().map(|s| s.as_str()).collect();
        run_ok(&argv, dir.path());
    }
    let a = std::fs::read(dir.path().join("a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("b.csv")).unwrap();
    let c = std::fs::read(dir.path().join("c.csv")).unwrap();
    assert_eq!(a, b, "1 vs 8 threads must agree byte-for-byte");
    assert_eq!(a, c, "repeat runs must agree byte-for-byte");
}

#[test]
fn verify_decomposition_passes_and_embeds_config() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &["verify", "decomposition", "--process", "bfbm", "--H", "0.6", "--K", "0.4", "--out", "d.json"],
        dir.path(),
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("d.json")).unwrap())
            .unwrap();
    assert_eq!(v["config"]["command"], "verify");
    assert_eq!(v["config"]["audit"], "decomposition");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    let rep = &v["reports"][0];
    assert_eq!(rep["pass"], true);
    assert!(rep["measured"][0][1].as_f64().unwrap() <= 1e-12);
}

#[test]
fn verify_lass_reports_limit() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "verify",
            "lass",
            "--process",
            "ext",
            "--K",
            "0.6",
            "--hurst",
            "sine:mu=0.3,nu=0.7,period=1,phase=0",
            "--t",
            "1",
            "--out",
            "lass.json",
        ],
        dir.path(),
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("lass.json")).unwrap())
            .unwrap();
    let rep = &v["reports"][0];
    assert_eq!(rep["pass"], true);
    // sigma^2 target 2^(1-K) = 2^0.4 is among the measured quantities
    let measured = rep["measured"].as_array().unwrap();
    let sigma = measured
        .iter()
        .find(|m| m[0] == "sigma2_target")
        .and_then(|m| m[1].as_f64())
        .unwrap();
    assert!((sigma - 2f64.powf(0.4)).abs() < 1e-12);
}

#[test]
fn verify_psd_sweep_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_ok(
        &["verify", "psd", "--sweep", "12", "--seed", "3", "--out", "psd.json"],
        dir.path(),
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("psd.json")).unwrap())
            .unwrap();
    assert_eq!(v["reports"].as_array().unwrap().len(), 12);
    assert!(String::from_utf8_lossy(&out.stdout).contains("all pass"));
}

#[test]
fn verify_quasi_helix_and_tk_and_prop2_and_holder() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &["verify", "quasi-helix", "--process", "bfbm", "--H", "0.7", "--K", "0.4", "--out", "q.json"],
        dir.path(),
    );
    run_ok(&["verify", "tk-identity", "--out", "tk.json"], dir.path());
    run_ok(&["verify", "prop2", "--process", "xk", "--K", "0.5", "--out", "p2.json"], dir.path());
    run_ok(
        &[
            "verify",
            "holder",
            "--process",
            "ext",
            "--K",
            "0.5",
            "--hurst",
            "sine:mu=0.3,nu=0.7,period=1,phase=0",
            "--pairs",
            "2000",
            "--out",
            "h.json",
        ],
        dir.path(),
    );
}

#[test]
fn lrd_dichotomy_and_boundary() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &["lrd", "--process", "bfbm", "--H", "0.9", "--K", "0.7", "--n-terms", "1500", "--out", "lrd.json"],
        dir.path(),
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("lrd.json")).unwrap())
            .unwrap();
    let notes: Vec<String> = v["reports"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["notes"].as_str().unwrap_or_default().to_string())
        .collect();
    assert!(notes.iter().any(|n| n.contains("classification: LONG")), "{notes:?}");

    // 2HK = 1: boundary, still exit zero
    run_ok(
        &["lrd", "--process", "bfbm", "--H", "0.5", "--K", "1.0", "--n-terms", "1500", "--out", "b.json"],
        dir.path(),
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("b.json")).unwrap())
            .unwrap();
    let all: String = serde_json::to_string(&v).unwrap();
    assert!(all.contains("BOUNDARY (not asserted)"));
}

#[test]
fn estimate_round_trip_recovers_brownian() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "simulate",
            "--process",
            "bfbm",
            "--H",
            "0.5",
            "--K",
            "1",
            "--grid",
            "0:1:2047",
            "--paths",
            "60",
            "--seed",
            "1",
            "--out",
            "bm.csv",
        ],
        dir.path(),
    );
    run_ok(&["estimate", "--input", "bm.csv", "--out", "est.json"], dir.path());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("est.json")).unwrap())
            .unwrap();
    let estimates = v["estimates"].as_array().unwrap();
    assert!(!estimates.is_empty());
    for e in estimates {
        let est = e["estimate"].as_f64().unwrap();
        assert!((est - 0.5).abs() < 0.08, "Brownian estimate {est}");
    }
}

#[test]
fn out_dir_env_var_is_honored_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("reports");
    std::fs::create_dir(&sub).unwrap();
    let out = bin()
        .args(["verify", "decomposition", "--process", "bfbm", "--H", "0.6", "--K", "0.4"])
        .env("MULTIFRAC_OUT_DIR", &sub)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(sub.join("verify-decomposition.json").exists());

    // explicit --out wins over the environment
    let out = bin()
        .args([
            "verify",
            "decomposition",
            "--process",
            "bfbm",
            "--H",
            "0.6",
            "--K",
            "0.4",
            "--out",
            "here.json",
        ])
        .env("MULTIFRAC_OUT_DIR", &sub)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("here.json").exists());
    assert!(!sub.join("here.json").exists());
}

#[test]
fn rerunning_embedded_config_reproduces_measured_values() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["r1.json", "r2.json"] {
        run_ok(
            &[
                "verify",
                "lass",
                "--process",
                "ext",
                "--K",
                "0.6",
                "--hurst",
                "sine:mu=0.3,nu=0.7,period=1,phase=0",
                "--t",
                "1",
                "--seed",
                "5",
                "--out",
                name,
            ],
            dir.path(),
        );
    }
    let load = |name: &str| -> serde_json::Value {
        serde_json::from_str(&std::fs::read_to_string(dir.path().join(name)).unwrap()).unwrap()
    };
    let (a, b) = (load("r1.json"), load("r2.json"));
    assert_eq!(a["reports"], b["reports"], "measured values must reproduce bit-for-bit");
    // and the embedded config reproduces through the library entry point too
    let cfg: multifrac::cli::RunConfig = serde_json::from_value(a["config"].clone()).unwrap();
    let mut cfg2 = cfg.clone();
    cfg2.out = Some(dir.path().join("r3.json").to_string_lossy().into_owned());
    multifrac::cli::run(&cfg2).unwrap();
    let c = load("r3.json");
    assert_eq!(a["reports"], c["reports"]);
}

#[test]
fn failure_and_config_error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // an impossible tolerance forces an audit failure -> exit 1
    let out = bin()
        .args(["verify", "tk-identity", "--tolerance", "1e-30", "--out", "f.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));

    // unknown audit -> exit 2
    let out = bin()
        .args(["verify", "nonsense", "--out", "g.json"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // missing process spec -> exit 2
    let out = bin()
        .args(["simulate", "--grid", "0:1:8", "--out", "x.csv"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // invalid parameter -> exit 2
    let out = bin()
        .args(["simulate", "--process", "bfbm", "--H", "1.5", "--K", "0.5", "--grid", "0:1:8"])
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_infers_family_from_bare_parameters() {
    let dir = tempfile::tempdir().unwrap();
    // the spec'd invocation shape: no --process, family inferred as bfbm
    run_ok(&["verify", "decomposition", "--H", "0.6", "--K", "0.4", "--out", "i.json"], dir.path());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("i.json")).unwrap())
            .unwrap();
    assert_eq!(v["reports"][0]["pass"], true);
    assert_eq!(v["config"]["process"]["family"], "bfbm");
}

#[test]
fn simulate_brownian_column_variance() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &[
            "simulate",
            "--process",
            "bfbm",
            "--H",
            "0.5",
            "--K",
            "1",
            "--grid",
            "0:1:16",
            "--paths",
            "2000",
            "--seed",
            "2024",
            "--out",
            "bm16.csv",
        ],
        dir.path(),
    );
    let text = std::fs::read_to_string(dir.path().join("bm16.csv")).unwrap();
    let (times, paths) = multifrac::cli::parse_paths_csv(&text).unwrap();
    let last = times.len() - 1;
    assert_eq!(times[last], 1.0);
    let m = paths.len() as f64;
    let mean: f64 = paths.iter().map(|p| p[last]).sum::<f64>() / m;
    let var: f64 = paths.iter().map(|p| (p[last] - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let band = 3.0 * (2.0 / m).sqrt();
    assert!((var - 1.0).abs() <= band, "variance {var} outside 1 +/- {band}");
}

#[test]
fn check_psd_command() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(
        &["check-psd", "--process", "xk", "--K", "0.5", "--grid", "1:5:16", "--out", "xk.json"],
        dir.path(),
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("xk.json")).unwrap())
            .unwrap();
    assert_eq!(v["reports"][0]["pass"], true);
}
