use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use stl_qlearn::experiment::{
    run_evaluate, run_inspect, run_monitor, run_train, ExperimentConfig, ExperimentError,
};
use stl_qlearn::learning::ObjectiveKind;
use stl_qlearn::stl::{robustness, Signal};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn config(name: &str) -> ExperimentConfig {
    ExperimentConfig::from_file(&config_path(name)).unwrap()
}

const TINY: &str = "
[layout]
x_min = 0
x_max = 1
y_min = 0
y_max = 1
pitch = 1
initial = 0.5, 0.5

[noise]
delta_theta_deg = 10
step_length = 0.5

[formula]
inside := x > -1 & x < 2
phi = G[0,3)(F[0,2)(inside))

[learning]
objective = max_probability
alpha = 0.5
gamma = 0.9
epsilon_base = 0.9
episodes = 20
seed = 4

[evaluation]
rollouts = 25
seed = 5
";

fn rows(path: &Path) -> usize {
    csv::Reader::from_path(path).unwrap().records().count()
}

#[test]
fn case_study_configs_train() {
    for (name, episodes) in [("cs1.cfg", 300), ("cs2.cfg", 1200)] {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(name);
        let s = run_train(&cfg, dir.path()).unwrap();
        assert_eq!(s.episodes, episodes);
        assert_eq!(rows(&dir.path().join("training_log.csv")), episodes);
        assert_eq!(rows(&dir.path().join("states.csv")), s.states);
        assert_eq!(rows(&dir.path().join("qtable.csv")), s.states * 4 * (s.horizon + 1));
        assert!(s.sat > 0 && s.mixed == 0);
        // gamma = 1 with a constant step size is allowed but flagged
        if name == "cs1.cfg" {
            assert!(!s.warnings.is_empty());
        }
    }
}

#[test]
fn zero_episodes_still_produce_artifacts() {
    let mut cfg = config("cs1.cfg");
    cfg.learning.episodes = 0;
    let dir = tempfile::tempdir().unwrap();
    run_train(&cfg, dir.path()).unwrap();
    assert_eq!(rows(&dir.path().join("training_log.csv")), 0);
    let report = run_evaluate(&cfg, dir.path(), Some(20)).unwrap();
    assert_eq!(report.rollouts, 20);
}

fn read_signals(path: &Path) -> BTreeMap<usize, Vec<Vec<f64>>> {
    let mut out: BTreeMap<usize, Vec<Vec<f64>>> = BTreeMap::new();
    let mut r = csv::Reader::from_path(path).unwrap();
    for rec in r.records() {
        let rec = rec.unwrap();
        let i: usize = rec[0].parse().unwrap();
        let t: usize = rec[1].parse().unwrap();
        let v = out.entry(i).or_default();
        assert_eq!(v.len(), t);
        v.push(vec![rec[2].parse().unwrap(), rec[3].parse().unwrap()]);
    }
    out
}

#[test]
fn estimates_recompute_from_dumped_signals() {
    let cfg = config("cs1.cfg");
    let dir = tempfile::tempdir().unwrap();
    run_train(&cfg, dir.path()).unwrap();
    let report = run_evaluate(&cfg, dir.path(), Some(60)).unwrap();
    let spec = cfg.build().unwrap().spec;
    let signals = read_signals(&dir.path().join("signals.csv"));
    assert_eq!(signals.len(), 60);
    let rob: Vec<f64> = signals
        .into_values()
        .map(|s| robustness(&Signal::from_samples(s).unwrap(), &spec, 0).unwrap())
        .collect();
    let p = rob.iter().filter(|&&r| r > 0.0).count() as f64 / 60.0;
    let mean = rob.iter().sum::<f64>() / 60.0;
    assert_eq!(report.p_hat, Some(p));
    assert!((report.mean.unwrap() - mean).abs() < 1e-12);
    let var = rob.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / 59.0;
    assert!((report.std.unwrap() - var.sqrt()).abs() < 1e-12);
    assert_eq!(report.soundness_violations, 0);
    assert_eq!(report.satisfied_count() as f64, p * 60.0);
    let total: usize = report.histogram.iter().map(|b| b.count).sum();
    assert_eq!(total, 60);
    assert_eq!(rows(&dir.path().join("evaluation.csv")), 60);
}

#[test]
fn always_satisfied_toy() {
    let cfg = ExperimentConfig::parse(TINY).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_train(&cfg, dir.path()).unwrap();
    let report = run_evaluate(&cfg, dir.path(), None).unwrap();
    assert_eq!(report.p_hat, Some(1.0));
    assert!(report.mean.unwrap() >= 1.0);
}

#[test]
fn no_rollouts_leave_estimates_undefined() {
    let cfg = ExperimentConfig::parse(TINY).unwrap();
    let dir = tempfile::tempdir().unwrap();
    run_train(&cfg, dir.path()).unwrap();
    let report = run_evaluate(&cfg, dir.path(), Some(0)).unwrap();
    assert_eq!(report.p_hat, None);
    assert_eq!(report.mean, None);
}

#[test]
fn evaluate_rejects_foreign_artifacts() {
    let cfg = config("cs1.cfg");
    let dir = tempfile::tempdir().unwrap();
    run_train(&cfg, dir.path()).unwrap();
    let mut other = cfg.clone();
    other.learning.objective = ObjectiveKind::MaxProbability;
    let err = run_evaluate(&other, dir.path(), Some(5)).unwrap_err();
    assert!(matches!(err, ExperimentError::Artifact(_)));
    let empty = tempfile::tempdir().unwrap();
    assert!(run_evaluate(&cfg, empty.path(), Some(5)).is_err());
}

fn dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect()
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = config("cs2.cfg");
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        run_train(&cfg, d.path()).unwrap();
        run_evaluate(&cfg, d.path(), Some(50)).unwrap();
    }
    let (da, db) = (dir_bytes(a.path()), dir_bytes(b.path()));
    assert_eq!(da.len(), 9);
    assert_eq!(da, db);
}

#[test]
fn inspect_tiny_grid() {
    let cfg = ExperimentConfig::parse(TINY).unwrap();
    let mut out = Vec::new();
    let s = run_inspect(&cfg, &mut out).unwrap();
    assert_eq!(s.states, 2);
    let text = String::from_utf8(out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().next().unwrap().starts_with("state_id,history,class,signed_distance"));
}

#[test]
fn inspect_case_study() {
    let s = run_inspect(&config("cs1.cfg"), std::io::sink()).unwrap();
    assert!(s.sat > 0);
    assert_eq!(s.mixed, 0);
    assert_eq!(s.sat + s.unsat, s.states);
}

#[test]
fn monitor_examples() {
    let dir = tempfile::tempdir().unwrap();
    let sig = dir.path().join("s.csv");
    std::fs::write(&sig, "t,x\n0,2.0\n1,2.5\n2,2.9\n").unwrap();
    let (ok, r) = run_monitor("G[0,3)(x < 3)", &sig).unwrap();
    assert!(ok);
    assert!((r - 0.1).abs() < 1e-12);
    let (ok, r) = run_monitor("F[0,3)(x > 3)", &sig).unwrap();
    assert!(!ok && r < 0.0);
    let f = dir.path().join("phi.stl");
    std::fs::write(&f, "# alias then formula\nlow := x < 2.2\nF[0,3)(low)\n").unwrap();
    let (ok, r) = run_monitor(f.to_str().unwrap(), &sig).unwrap();
    assert!(ok && (r - 0.2).abs() < 1e-12);
    // window longer than the signal
    assert!(run_monitor("G[0,5)(x < 3)", &sig).is_err());
}

#[test]
fn invalid_configs_are_rejected() {
    let bad = [
        TINY.replace("gamma = 0.9", "gamma = 1.5"),
        TINY.replace("seed = 4", ""),
        TINY.replace("[noise]", "[noise]\nwobble = 3"),
        TINY.replace("phi = G[0,3)(F[0,2)(inside))", "phi = F[0,2)(inside) & G[0,1)(inside)"),
        TINY.replace("step_length = 0.5", "step_length = 2"),
        TINY.replace("delta_theta_deg = 10", "delta_theta_deg = 50"),
    ];
    for text in bad {
        let err = ExperimentConfig::parse(&text).and_then(|c| c.build().map(|_| ()));
        let e = err.unwrap_err();
        assert_eq!(e.exit_code(), 1, "{e}");
    }
}
