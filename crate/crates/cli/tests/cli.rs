use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wlnn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wlnn")).args(args).output().expect("binary runs")
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn adr_without_schemes_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = wlnn(&["adr", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_scheme_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = wlnn(&["run", "--experiment", "test1_1", "--scheme", "ce4", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown scheme"));
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_wlnn"))
        .args(["adr", "--scheme", "ce6", "--out", path(dir.path())])
        .env("WLNN_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn adr_writes_one_csv_per_scheme() {
    let dir = tempfile::tempdir().unwrap();
    let out = wlnn(&["adr", "--scheme", "ce6", "--scheme", "up5", "--out", path(dir.path())]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["ce6", "up5"] {
        let csv = fs::read_to_string(dir.path().join(format!("adr_{name}.csv"))).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("phi,re_phi,im_phi,re_exact,im_exact"));
        assert_eq!(lines.count(), 32);
    }
}

#[test]
fn dataset_train_run_round_trip_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ds = d.join("ds.txt");
    let out = wlnn(&["dataset", "--family", "scalar1d", "--lambdas", "2", "--times", "3", "--n", "24", "--out", path(&ds)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(fs::read_to_string(&ds).unwrap().starts_with("wlnn-dataset v1 kind=scalar1d grid=24"));

    for run in ["a", "b"] {
        let out = wlnn(&["train", "--dataset", path(&ds), "--epochs", "3", "--seed", "7", "--out", path(&d.join(run))]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let loss_a = fs::read(d.join("a/loss.csv")).unwrap();
    assert_eq!(loss_a, fs::read(d.join("b/loss.csv")).unwrap());
    assert_eq!(String::from_utf8_lossy(&loss_a).lines().count(), 4);
    assert_eq!(fs::read(d.join("a/model.txt")).unwrap(), fs::read(d.join("b/model.txt")).unwrap());

    let model = d.join("a/model.txt");
    let out = wlnn(&[
        "run", "--experiment", "test1_1", "--model", path(&model), "--times", "4", "--t-end", "0.2", "--dump",
        "--out", path(&d.join("r")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = fs::read_to_string(d.join("r/summary.csv")).unwrap();
    assert!(summary.starts_with("scheme,mean_l2,status\nce6,"));
    assert!(summary.contains("\nwlnn,"));
    let errors = fs::read_to_string(d.join("r/errors_wlnn.csv")).unwrap();
    assert_eq!(errors.lines().next(), Some("t,l2_error"));
    assert_eq!(errors.lines().count(), 5);
    assert!(fs::read_to_string(d.join("r/final_up5.csv")).unwrap().starts_with("# grid dim=1 n=60"));
}

#[test]
fn zero_epochs_writes_the_initial_network() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ds = d.join("ds.txt");
    assert!(wlnn(&["dataset", "--family", "scalar1d", "--lambdas", "1", "--times", "2", "--out", path(&ds)]).status.success());
    let out = wlnn(&["train", "--dataset", path(&ds), "--epochs", "0", "--out", path(&d.join("m"))]);
    assert!(out.status.success());
    assert_eq!(fs::read_to_string(d.join("m/loss.csv")).unwrap(), "epoch,loss,lr\n");
    // The untrained network reproduces CE6 exactly.
    let run = |scheme: &str, dir: &str| {
        let out = wlnn(&[
            "run", "--experiment", "test1_1", "--scheme", scheme, "--model", path(&d.join("m/model.txt")),
            "--times", "2", "--t-end", "0.1", "--out", path(&d.join(dir)),
        ]);
        assert!(out.status.success());
        fs::read_to_string(d.join(dir).join(format!("errors_{scheme}.csv"))).unwrap()
    };
    assert_eq!(run("wlnn", "w"), run("ce6", "c"));
}

#[test]
fn vortex_run_reports_density_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = wlnn(&[
        "run", "--experiment", "test3", "--scheme", "up5", "--t-end", "0.5", "--times", "2", "--out", path(dir.path()),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("errors_up5.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
}

#[test]
fn taylor_green_from_a_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let ds = d.join("tg.txt");
    let out = wlnn(&["dataset", "--family", "euler3d", "--n", "4", "--times", "2", "--t-end", "0.2", "--out", path(&ds)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = wlnn(&[
        "run", "--experiment", "test4", "--dataset", path(&ds), "--scheme", "ce6", "--scheme", "up5", "--t-end", "0.4",
        "--times", "2", "--out", path(&d.join("r")),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(d.join("r/diagnostics_ce6.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,K,Omega"));
    assert!(lines.next().unwrap().starts_with("2.0000000000000001e-1,1.0000000000000000e0,1.0000000000000000e0"));
    assert!(fs::read_to_string(d.join("r/summary.csv")).unwrap().starts_with("scheme,wall_seconds"));
}
