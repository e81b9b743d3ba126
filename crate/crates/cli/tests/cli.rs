use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn stlq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stlq")).args(args).output().unwrap()
}

fn cfg(name: &str) -> String {
    let p: PathBuf = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    p.to_string_lossy().into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn train_then_evaluate_twice() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let c = cfg("cs1.cfg");
    for d in [&a, &b] {
        let dir = d.path().to_str().unwrap();
        let o = stlq(&["train", "--config", &c, "--out", dir, "--objective", "max_probability"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stdout).contains("tau-states: 3123"));
        let o = stlq(&[
            "evaluate", "--config", &c, "--artifacts", dir, "--rollouts", "40", "--objective",
            "max_probability",
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        assert!(String::from_utf8_lossy(&o.stdout).contains("satisfaction probability"));
    }
    for f in [
        "qtable.csv",
        "policy.csv",
        "states.csv",
        "training_log.csv",
        "manifest.txt",
        "evaluation.csv",
        "histogram.csv",
        "signals.csv",
        "evaluation_summary.txt",
    ] {
        assert_eq!(
            std::fs::read(a.path().join(f)).unwrap(),
            std::fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    // a different objective does not match the stored artifacts
    let o = stlq(&["evaluate", "--config", &c, "--artifacts", a.path().to_str().unwrap()]);
    assert_eq!(code(&o), 1);
}

#[test]
fn seed_override_changes_the_manifest() {
    let d = tempfile::tempdir().unwrap();
    let dir = d.path().to_str().unwrap();
    let o = stlq(&["train", "--config", &cfg("cs1.cfg"), "--seed", "9", "--out", dir]);
    assert_eq!(code(&o), 0);
    let m = std::fs::read_to_string(d.path().join("manifest.txt")).unwrap();
    assert!(m.contains("seed = 9"), "{m}");
}

#[test]
fn monitor_exit_codes() {
    let d = tempfile::tempdir().unwrap();
    let sig = d.path().join("s.csv");
    std::fs::write(&sig, "t,x\n0,2.0\n1,2.5\n2,2.9\n").unwrap();
    let s = sig.to_str().unwrap();
    let o = stlq(&["monitor", "--formula", "G[0,3)(x < 3)", "--signal", s]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("satisfied: true"));
    let o = stlq(&["monitor", "--formula", "G[0,3)(x < 2.7)", "--signal", s]);
    assert_eq!(code(&o), 3);
    let o = stlq(&["monitor", "--formula", "G[0,3)(", "--signal", s]);
    assert_eq!(code(&o), 1);
    let o = stlq(&["monitor", "--formula", "G[0,3)(x < 3)", "--signal", "/nonexistent.csv"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn inspect_writes_csv_to_stdout() {
    let o = stlq(&["inspect", "--config", &cfg("cs2.cfg")]);
    assert_eq!(code(&o), 0);
    let out = String::from_utf8(o.stdout).unwrap();
    assert!(out.starts_with("state_id,history,class,signed_distance\n"));
    assert_eq!(out.lines().count(), 3140);
    assert!(String::from_utf8_lossy(&o.stderr).contains("MIXED 0"));
}

#[test]
fn validation_errors_exit_one() {
    let d = tempfile::tempdir().unwrap();
    let bad = d.path().join("bad.cfg");
    let text = std::fs::read_to_string(cfg("cs1.cfg")).unwrap().replace("gamma = 1", "gamma = 0");
    std::fs::write(&bad, text).unwrap();
    let o = stlq(&["inspect", "--config", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert_eq!(code(&stlq(&["train", "--config", bad.to_str().unwrap()])), 1);
    assert_eq!(code(&stlq(&["train"])), 1);
    assert_eq!(code(&stlq(&["inspect", "--config", "/nonexistent.cfg"])), 1);
    assert_eq!(code(&stlq(&["train", "--config", &cfg("cs1.cfg"), "--objective", "fastest"])), 1);
}
