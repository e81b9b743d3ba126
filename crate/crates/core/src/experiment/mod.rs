//! Configuration files, persisted artifacts and the train / evaluate /
//! monitor / inspect workflows used by the `stlq` binary.

mod artifacts;
mod config;
mod evaluate;

use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::gridworld::{EnvError, QuotientGraph};
use crate::learning::{train, GridworldEpisodes, LearnError, Policy, QTable};
use crate::stl::{robustness, satisfies, ParseContext, Signal, StlError};
use crate::tau_mdp::{signed_distances, Class, SatisfyingSet, StateTable, TauError};

pub use artifacts::{read_manifest, Manifest};
pub use config::{
    EvaluationSection, ExperimentConfig, FormulaSection, LayoutSection, LearningSection,
    NoiseSection, Setup,
};
pub use evaluate::{evaluate_policy, EvaluationReport, HistogramBin, RolloutRecord, BIN_WIDTH};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("artifacts: {0}")]
    Artifact(String),
    #[error(transparent)]
    Stl(#[from] StlError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Tau(#[from] TauError),
    #[error(transparent)]
    Learn(#[from] LearnError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl ExperimentError {
    /// `1` for invalid input, `2` for failures while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_)
            | ExperimentError::Artifact(_)
            | ExperimentError::Stl(_)
            | ExperimentError::Env(_)
            | ExperimentError::Learn(LearnError::Schedule(_)) => 1,
            ExperimentError::Tau(TauError::WindowMismatch { .. }) => 1,
            _ => 2,
        }
    }
}

/// Layout, tau-MDP and classification for a configuration.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub setup: Setup,
    pub graph: QuotientGraph,
    pub table: StateTable,
    pub classes: SatisfyingSet,
    /// `None` when the satisfying set or its complement is empty.
    pub distances: Option<Vec<i64>>,
    pub build_time: Duration,
}

impl Prepared {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self, ExperimentError> {
        let setup = cfg.build()?;
        let start = Instant::now();
        let graph = QuotientGraph::from_layout(&setup.layout);
        let initial = setup
            .layout
            .cell_index(setup.layout.region_of(setup.layout.initial())?);
        let table = StateTable::enumerate_reachable(
            &graph,
            setup.window,
            &[initial],
            cfg.learning.state_cap,
        )?;
        let inner = setup.spec.top_level()?.inner;
        let classes = SatisfyingSet::build(&table, &inner, &setup.layout)?;
        let distances = match signed_distances(table.successor_lists(), &classes.mask()) {
            Ok(d) => Some(d),
            Err(TauError::DegenerateSet(_)) => None,
            Err(e) => return Err(e.into()),
        };
        Ok(Prepared {
            setup,
            graph,
            table,
            classes,
            distances,
            build_time: start.elapsed(),
        })
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        let mixed: Vec<usize> = (0..self.table.len())
            .filter(|&s| self.classes.class(s) == Class::Mixed)
            .collect();
        if !mixed.is_empty() {
            let sample: Vec<String> = mixed
                .iter()
                .take(3)
                .map(|&s| self.table.state(s).display(&self.graph).to_string())
                .collect();
            w.push(format!(
                "{} tau-states are MIXED (cells straddle a predicate threshold), e.g. {}",
                mixed.len(),
                sample.join(", ")
            ));
        }
        if self.distances.is_none() {
            w.push("signed distances undefined: the satisfying set or its complement is empty".into());
        }
        w
    }

    fn source(&self, cfg: &ExperimentConfig, rng: ChaCha8Rng) -> Result<GridworldEpisodes<'_, f64>, ExperimentError> {
        Ok(GridworldEpisodes::new(
            &self.setup.layout,
            &self.setup.noise,
            &self.table,
            &self.setup.spec,
            cfg.learning.objective,
            self.setup.horizon,
            rng,
        )?)
    }
}

#[derive(Clone, Debug)]
pub struct TrainSummary {
    pub states: usize,
    pub sat: usize,
    pub unsat: usize,
    pub mixed: usize,
    pub episodes: usize,
    pub horizon: usize,
    pub build_time: Duration,
    pub train_time: Duration,
    pub warnings: Vec<String>,
}

/// Trains per the configuration and writes `qtable.csv`, `policy.csv`,
/// `states.csv`, `training_log.csv` and `manifest.txt` into `out`.
pub fn run_train(cfg: &ExperimentConfig, out: &Path) -> Result<TrainSummary, ExperimentError> {
    let prep = Prepared::new(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.learning.seed);
    rng.set_stream(2);
    let mut source = prep.source(cfg, rng)?;
    let start = Instant::now();
    let outcome = train(&mut source, &prep.setup.schedule)?;
    let train_time = start.elapsed();

    std::fs::create_dir_all(out)?;
    artifacts::write_qtable(&out.join("qtable.csv"), &outcome.q)?;
    artifacts::write_policy(&out.join("policy.csv"), &outcome.policy)?;
    artifacts::write_states(std::fs::File::create(out.join("states.csv"))?, &prep)?;
    artifacts::write_log(&out.join("training_log.csv"), &outcome.log)?;
    let manifest = Manifest {
        config_sha256: cfg.hash(),
        seed: cfg.learning.seed,
        episodes: cfg.learning.episodes,
        objective: cfg.learning.objective.name().to_string(),
        states: prep.table.len(),
        horizon: prep.setup.horizon,
    };
    artifacts::write_manifest(&out.join("manifest.txt"), &manifest)?;

    let mut warnings = prep.warnings();
    warnings.extend(outcome.warnings);
    Ok(TrainSummary {
        states: prep.table.len(),
        sat: prep.classes.count(Class::Sat),
        unsat: prep.classes.count(Class::Unsat),
        mixed: prep.classes.count(Class::Mixed),
        episodes: outcome.log.len(),
        horizon: prep.setup.horizon,
        build_time: prep.build_time,
        train_time,
        warnings,
    })
}

/// Loads the Q table written by [`run_train`] after checking that the
/// artifacts were produced from an equivalent configuration.
pub fn load_artifacts(
    cfg: &ExperimentConfig,
    prep: &Prepared,
    dir: &Path,
) -> Result<(Manifest, QTable<f64>), ExperimentError> {
    let manifest = read_manifest(&dir.join("manifest.txt"))?;
    if manifest.config_sha256 != cfg.hash() {
        return Err(ExperimentError::Artifact(format!(
            "artifacts in {} were trained from a different configuration",
            dir.display()
        )));
    }
    artifacts::check_states(&dir.join("states.csv"), prep)?;
    let q = artifacts::read_qtable(&dir.join("qtable.csv"), prep.table.len(), prep.setup.horizon)?;
    Ok((manifest, q))
}

/// Greedy rollouts of the trained policy; writes `evaluation.csv`,
/// `histogram.csv`, `signals.csv` and `evaluation_summary.txt` into the
/// artifact directory.
pub fn run_evaluate(
    cfg: &ExperimentConfig,
    dir: &Path,
    rollouts: Option<usize>,
) -> Result<EvaluationReport, ExperimentError> {
    let prep = Prepared::new(cfg)?;
    let (_, q) = load_artifacts(cfg, &prep, dir)?;
    let policy = crate::learning::greedy_policy(&q);
    let n = rollouts.unwrap_or(cfg.evaluation.rollouts);
    let report = evaluate_policy(&prep, cfg, &policy, n, cfg.evaluation.seed)?;
    evaluate::write_report(dir, &report)?;
    Ok(report)
}

/// Monitors a signal file. `formula` is either formula text or the path
/// of a file holding optional `name := ...` lines and the formula.
pub fn run_monitor(formula: &str, signal: &Path) -> Result<(bool, f64), ExperimentError> {
    let file = std::fs::File::open(signal)
        .map_err(|e| ExperimentError::Config(format!("cannot open {}: {e}", signal.display())))?;
    let (s, names) = Signal::<f64>::read_csv(file)?;
    let mut ctx = ParseContext::with_names(names);
    let text = if Path::new(formula).is_file() {
        std::fs::read_to_string(formula)?
    } else {
        formula.to_string()
    };
    let mut phi = None;
    for line in text.lines().map(str::trim) {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line.contains(":=") {
            ctx.define(line)?;
        } else if phi.replace(line).is_some() {
            return Err(ExperimentError::Config("more than one formula given".into()));
        }
    }
    let phi = ctx.parse(phi.ok_or_else(|| ExperimentError::Config("no formula given".into()))?)?;
    let t = s.start();
    Ok((satisfies(&s, &phi, t)?, robustness(&s, &phi, t)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InspectSummary {
    pub states: usize,
    pub sat: usize,
    pub unsat: usize,
    pub mixed: usize,
    pub warnings: Vec<String>,
}

/// Writes the state table as CSV (`state_id,history,class,signed_distance`).
pub fn run_inspect<W: Write>(cfg: &ExperimentConfig, out: W) -> Result<InspectSummary, ExperimentError> {
    let prep = Prepared::new(cfg)?;
    artifacts::write_states(out, &prep)?;
    Ok(InspectSummary {
        states: prep.table.len(),
        sat: prep.classes.count(Class::Sat),
        unsat: prep.classes.count(Class::Unsat),
        mixed: prep.classes.count(Class::Mixed),
        warnings: prep.warnings(),
    })
}

/// Policy lookup closure used by rollouts.
pub(crate) fn policy_fn(p: &Policy) -> impl Fn(usize, usize) -> usize + '_ {
    move |s, k| p.action(s, k)
}
