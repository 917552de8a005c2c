use std::path::Path;
use std::process::{Command, Output};

fn pibgc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pibgc"))
        .args(args)
        .env_remove("PIBGC_THREADS")
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn golden_plob_row() {
    let o = pibgc(&["bound", "attenuator", "--lambda", "0.75", "--nu", "1", "--method", "plob"]);
    assert!(o.status.success());
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden/plob_attenuator.csv"))
        .unwrap();
    assert_eq!(stdout(&o), golden);
}

#[test]
fn new_bound_at_the_reference_point() {
    let o = pibgc(&["bound", "attenuator", "--lambda", "0.75", "--nu", "1", "--method", "new"]);
    assert!(o.status.success());
    let r = &rows(&stdout(&o))[0];
    let value: f64 = r[7].parse().unwrap();
    let c: f64 = r[9].parse().unwrap();
    assert!((value - 0.033).abs() < 1e-3, "{value}");
    assert_eq!(r[8], "2");
    assert_eq!(r[10], "2");
    assert!((c - 0.703).abs() < 0.01, "{c}");
}

#[test]
fn entanglement_breaking_points_report_zero() {
    let o = pibgc(&["bound", "additive", "--xi", "1.0", "--method", "plob"]);
    assert!(o.status.success());
    assert_eq!(rows(&stdout(&o))[0][7], "0.00000000000e0");
    let o = pibgc(&["bound", "amplifier", "--g", "2", "--nu", "1", "--method", "all"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("entanglement-breaking"));
    let rs = rows(&stdout(&o));
    assert!(rs.len() >= 4);
    for r in rs {
        assert_eq!(r[7], "0.00000000000e0", "{r:?}");
        assert!(r[13].contains("entanglement-breaking"), "{r:?}");
    }
}

#[test]
fn sweep_output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for threads in ["1", "4"] {
        let out = dir.path().join(format!("sweep{threads}.csv"));
        let o = pibgc(&[
            "sweep", "attenuator", "--lambda", "0.5:1:0.05", "--nu", "1", "--ns", "2", "--method", "all",
            "--threads", threads, "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(o.stdout.is_empty());
        files.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(files[0], files[1]);
    let text = String::from_utf8(files[0].clone()).unwrap();
    let rs = rows(&text);
    assert_eq!(rs.len(), 11 * 6);
    let swept: Vec<f64> = rs.iter().map(|r| r[4].parse().unwrap()).collect();
    assert!(swept.windows(2).all(|w| w[0] <= w[1]));
    assert_eq!(
        rs[..6].iter().map(|r| r[6].as_str()).collect::<Vec<_>>(),
        ["new", "multirail", "PLOB", "CI_EC", "RCI_EC", "NPJ"]
    );
    // each number survives a parse and re-format unchanged
    for r in &rs {
        let v: f64 = r[7].parse().unwrap();
        assert_eq!(format!("{v:.11e}"), r[7]);
    }
}

#[test]
fn thread_count_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_pibgc"))
        .args(["bound", "attenuator", "--lambda", "0.9", "--nu", "0.1", "--method", "plob"])
        .env("PIBGC_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_output_parses() {
    let o = pibgc(&["bound", "attenuator", "--lambda", "0.9", "--nu", "1", "--ns", "1", "--method", "ci,rci", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let arr = v.as_array().unwrap();
    assert_eq!(arr.len(), 2);
    assert_eq!(arr[0]["method"], "CI_EC");
    assert_eq!(arr[1]["method"], "RCI_EC");
    assert!(arr[1]["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn invalid_input_exits_with_2() {
    let cases: &[&[&str]] = &[
        &["bound", "attenuator", "--lambda", "1.5", "--nu", "1"],
        &["bound", "attenuator", "--lambda", "0.8"],
        &["bound", "attenuator", "--lambda", "0.8", "--nu", "1", "--g", "2"],
        &["bound", "attenuator", "--lambda", "0.8", "--nu", "1", "--frobnicate"],
        &["bound", "amplifier", "--g", "1.5", "--nu", "1", "--method", "rci"],
        &["bound", "attenuator", "--lambda", "0.8", "--nu", "1", "--method", "npj"],
        &["bound", "attenuator", "--lambda", "0.5:1:0.1", "--nu", "1"],
        &["sweep", "attenuator", "--lambda", "0.8", "--nu", "1"],
        &["bound", "attenuator", "--lambda", "0.8", "--nu", "1", "--format", "xml"],
        &["bound", "attenuator", "--lambda", "0.8", "--nu", "1", "--ns", "-1"],
        &[],
    ];
    for args in cases {
        assert_eq!(pibgc(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn failed_sweep_leaves_no_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad.csv");
    let o = pibgc(&["sweep", "attenuator", "--lambda", "0.5:1.5:0.1", "--nu", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn verify_exit_codes_and_json() {
    let o = pibgc(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = pibgc(&["verify", "--perturb-f", "1e-6"]);
    assert_eq!(o.status.code(), Some(1));
    let o = pibgc(&["verify", "--json", "--perturb-f", "1e-6"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], false);
    let trace = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "kraus-trace-preservation").unwrap();
    assert_eq!(trace["passed"], false);
    assert!(!trace["failures"].as_array().unwrap().is_empty());
}

#[test]
fn config_file_and_print_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("budget.toml");
    std::fs::write(&cfg, "[optimizer]\nk_max = 7\n").unwrap();
    let o = pibgc(&["--config", cfg.to_str().unwrap(), "--print-config"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("k_max = 7"));
    std::fs::write(&cfg, "[optimizer]\nk_maximum = 7\n").unwrap();
    let o = pibgc(&["--config", cfg.to_str().unwrap(), "--print-config"]);
    assert_eq!(o.status.code(), Some(2));
}
