use std::io::Write;
use std::path::Path;

use crate::gridworld::Action;
use crate::learning::{LogRow, Policy, QTable};
use crate::tau_mdp::UNREACHABLE;

use super::{ExperimentError, Prepared};

fn bad(path: &Path, msg: impl std::fmt::Display) -> ExperimentError {
    ExperimentError::Artifact(format!("{}: {msg}", path.display()))
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

pub(super) fn write_qtable(path: &Path, q: &QTable<f64>) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["state_id", "action", "time_to_go", "q_value"])?;
    for s in 0..q.n_states() {
        for a in 0..q.n_actions() {
            let name = Action::from_index(a).map_or_else(|| a.to_string(), |a| a.name().to_string());
            for k in 0..=q.horizon() {
                w.write_record([s.to_string(), name.clone(), k.to_string(), q.get(s, a, k).to_string()])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub(super) fn read_qtable(path: &Path, n_states: usize, horizon: usize) -> Result<QTable<f64>, ExperimentError> {
    let mut r = csv::Reader::from_path(path)?;
    let n_actions = Action::ALL.len();
    let mut q = QTable::constant(n_states, n_actions, horizon, f64::NAN);
    let mut seen = 0usize;
    for rec in r.records() {
        let rec = rec?;
        if rec.len() != 4 {
            return Err(bad(path, "expected 4 columns"));
        }
        let s: usize = rec[0].parse().map_err(|_| bad(path, "bad state_id"))?;
        let a = Action::parse(&rec[1]).ok_or_else(|| bad(path, "bad action"))?.index();
        let k: usize = rec[2].parse().map_err(|_| bad(path, "bad time_to_go"))?;
        let v: f64 = rec[3].parse().map_err(|_| bad(path, "bad q_value"))?;
        if s >= n_states || k > horizon {
            return Err(bad(path, "entry outside the state table or horizon"));
        }
        if !q.get(s, a, k).is_nan() {
            return Err(bad(path, format!("duplicate entry ({s}, {a}, {k})")));
        }
        q.set(s, a, k, v);
        seen += 1;
    }
    if seen != n_states * n_actions * (horizon + 1) {
        return Err(bad(path, "table is incomplete"));
    }
    Ok(q)
}

pub(super) fn write_policy(path: &Path, p: &Policy) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["state_id", "time_to_go", "action"])?;
    for s in 0..p.n_states() {
        for k in 0..=p.horizon() {
            let a = Action::from_index(p.action(s, k)).expect("grid action");
            w.write_record([s.to_string(), k.to_string(), a.name().to_string()])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn distance_text(d: i64) -> String {
    match d {
        UNREACHABLE => "inf".into(),
        d if d == -UNREACHABLE => "-inf".into(),
        d => d.to_string(),
    }
}

pub(super) fn write_states<W: Write>(out: W, prep: &Prepared) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["state_id", "history", "class", "signed_distance"])?;
    for s in 0..prep.table.len() {
        w.write_record([
            s.to_string(),
            prep.table.state(s).display(&prep.graph).to_string(),
            prep.classes.class(s).name().to_string(),
            prep.distances.as_ref().map_or_else(String::new, |d| distance_text(d[s])),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Checks that the stored state dictionary matches the rebuilt table.
pub(super) fn check_states(path: &Path, prep: &Prepared) -> Result<(), ExperimentError> {
    let mut r = csv::Reader::from_path(path)?;
    let mut n = 0;
    for rec in r.records() {
        let rec = rec?;
        let id: usize = rec.get(0).and_then(|v| v.parse().ok()).ok_or_else(|| bad(path, "bad state_id"))?;
        let hist = rec.get(1).ok_or_else(|| bad(path, "missing history"))?;
        if id != n
            || id >= prep.table.len()
            || prep.table.state(id).display(&prep.graph).to_string() != hist
        {
            return Err(bad(path, format!("state {id} does not match the configuration")));
        }
        n += 1;
    }
    if n != prep.table.len() {
        return Err(bad(path, "state count does not match the configuration"));
    }
    Ok(())
}

pub(super) fn write_log(path: &Path, log: &[LogRow<f64>]) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["episode", "epsilon", "return", "robustness", "satisfied"])?;
    for row in log {
        w.write_record([
            row.episode.to_string(),
            row.epsilon.to_string(),
            opt(row.episode_return),
            opt(row.robustness),
            opt(row.satisfied),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Contents of `manifest.txt`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manifest {
    pub config_sha256: String,
    pub seed: u64,
    pub episodes: usize,
    pub objective: String,
    pub states: usize,
    pub horizon: usize,
}

pub(super) fn write_manifest(path: &Path, m: &Manifest) -> Result<(), ExperimentError> {
    let text = format!(
        "config_sha256 = {}\nseed = {}\nepisodes = {}\nobjective = {}\nstates = {}\nhorizon = {}\n",
        m.config_sha256, m.seed, m.episodes, m.objective, m.states, m.horizon
    );
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_manifest(path: &Path) -> Result<Manifest, ExperimentError> {
    let text = std::fs::read_to_string(path).map_err(|e| bad(path, e))?;
    let get = |key: &str| -> Result<String, ExperimentError> {
        text.lines()
            .filter_map(|l| l.split_once('='))
            .find(|(k, _)| k.trim() == key)
            .map(|(_, v)| v.trim().to_string())
            .ok_or_else(|| bad(path, format!("missing `{key}`")))
    };
    let num = |key: &str| -> Result<u64, ExperimentError> {
        get(key)?.parse().map_err(|_| bad(path, format!("bad `{key}`")))
    };
    Ok(Manifest {
        config_sha256: get("config_sha256")?,
        seed: num("seed")?,
        episodes: num("episodes")? as usize,
        objective: get("objective")?,
        states: num("states")? as usize,
        horizon: num("horizon")? as usize,
    })
}
