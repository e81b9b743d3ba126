//! Batch Q-learning over interned MDP states with time-to-go indexing.
//!
//! An episode of length `T` visits states `σ^0 .. σ^T` and takes actions
//! `a^0 .. a^{T-1}`; step `n` carries an optional local reward `ρ_n` (the
//! score of the window ending at sample `n`). The backward sweep sets
//!
//! ```text
//! target_n = op(ρ_n, γ · max_b Q(σ^{n+1}, b, T - n - 1))
//! Q(σ^n, a^n, T - n) <- (1 - α) Q(σ^n, a^n, T - n) + α target_n
//! ```
//!
//! with `op = max` for an outer `F` and `min` for an outer `G`. The last
//! updated step uses `ρ_n` alone. A missing reward is the neutral element
//! of `op`.

mod env;
mod oracle;
mod qtable;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::stl::Outer;
use crate::Scalar;

pub use env::GridworldEpisodes;
pub use oracle::{apply_h, contraction_check, value_iteration_oracle, ModelEpisodes};
pub use qtable::{greedy_policy, Policy, QTable};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LearnError {
    #[error("invalid learning schedule: {0}")]
    Schedule(String),
    #[error("episode of length {horizon} leaves no updatable step for tau = {tau}")]
    EpisodeTooShort { horizon: usize, tau: usize },
    #[error("episode shape: {0}")]
    Shape(String),
    #[error(transparent)]
    Tau(#[from] crate::tau_mdp::TauError),
    #[error(transparent)]
    Stl(#[from] crate::stl::StlError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObjectiveKind {
    /// Reward is the indicator that the window satisfies `psi`.
    MaxProbability,
    /// Reward is the robustness of `psi` on the window.
    MaxRobustness,
}

impl ObjectiveKind {
    pub fn name(self) -> &'static str {
        match self {
            ObjectiveKind::MaxProbability => "max_probability",
            ObjectiveKind::MaxRobustness => "max_robustness",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "max_probability" | "probability" => Some(ObjectiveKind::MaxProbability),
            "max_robustness" | "robustness" => Some(ObjectiveKind::MaxRobustness),
            _ => None,
        }
    }
}

/// How the backup combines the old value with the target.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Blend {
    /// `(1 - α) Q_old + α target`.
    Standard,
    /// `(1 - α) target + α Q_old`.
    Alg2,
}

/// Which steps of an episode are backed up.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateRange {
    /// `n = 0 ..= n_end`, where `n_end` is the last rewarded window
    /// (capped at `T - 1`).
    Full,
    /// `n = tau ..= T - tau - 1`.
    Algorithm,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlphaSchedule<T> {
    Constant(T),
    /// `1 / (1 + visits)` of the updated triple.
    PerVisit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LearningSchedule<T> {
    pub alpha: AlphaSchedule<T>,
    pub gamma: T,
    /// Exploration probability in episode `e` (1-based) is `epsilon_base^e`.
    pub epsilon_base: T,
    pub episodes: usize,
    pub seed: u64,
    pub blend: Blend,
    pub update_range: UpdateRange,
    /// Q values are initialised uniformly on this range.
    pub init: (T, T),
}

impl<T: Scalar> LearningSchedule<T> {
    pub fn new(alpha: AlphaSchedule<T>, gamma: T, epsilon_base: T, episodes: usize, seed: u64) -> Self {
        LearningSchedule {
            alpha,
            gamma,
            epsilon_base,
            episodes,
            seed,
            blend: Blend::Standard,
            update_range: UpdateRange::Full,
            init: (T::zero(), T::lit(0.1)),
        }
    }

    pub fn validate(&self) -> Result<(), LearnError> {
        let unit = |v: T| v > T::zero() && v <= T::one();
        if let AlphaSchedule::Constant(a) = self.alpha {
            if !unit(a) {
                return Err(LearnError::Schedule("alpha must lie in (0, 1]".into()));
            }
        }
        if !unit(self.gamma) {
            return Err(LearnError::Schedule("gamma must lie in (0, 1]".into()));
        }
        if !unit(self.epsilon_base) {
            return Err(LearnError::Schedule("epsilon base must lie in (0, 1]".into()));
        }
        if !(self.init.0 <= self.init.1) || !self.init.0.is_finite() || !self.init.1.is_finite() {
            return Err(LearnError::Schedule("initialisation range must be finite and ordered".into()));
        }
        Ok(())
    }

    /// Conditions outside the usual convergence guarantees.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.gamma == T::one() {
            w.push("gamma = 1: convergence is not guaranteed".to_string());
        }
        if matches!(self.alpha, AlphaSchedule::Constant(_)) {
            w.push("constant alpha: the step sizes are not square-summable".to_string());
        }
        w
    }

    /// Exploration probability for 1-based episode `e`.
    pub fn epsilon(&self, e: usize) -> T {
        self.epsilon_base.powi(e.min(i32::MAX as usize) as i32)
    }
}

/// One episode in interned form.
#[derive(Clone, Debug, PartialEq)]
pub struct LearningEpisode<T> {
    /// `T + 1` state ids.
    pub states: Vec<usize>,
    /// `T` action indices.
    pub actions: Vec<usize>,
    /// `T + 1` local rewards, `None` where no window is scored.
    pub rewards: Vec<Option<T>>,
    /// Robustness of the full specification on the episode, when known.
    pub robustness: Option<T>,
    pub satisfied: Option<bool>,
}

impl<T> LearningEpisode<T> {
    pub fn horizon(&self) -> usize {
        self.actions.len()
    }
}

/// Something that can simulate episodes under a supplied policy.
pub trait EpisodeSource<T: Scalar> {
    fn n_states(&self) -> usize;
    fn n_actions(&self) -> usize;
    /// Episode length `T`.
    fn horizon(&self) -> usize;
    /// History length of the states.
    fn tau(&self) -> usize;
    fn outer(&self) -> Outer;
    /// Index of the last scored window.
    fn last_reward_step(&self) -> usize;
    /// Runs one episode; `policy(state, time_to_go)` returns an action index.
    fn simulate(
        &mut self,
        policy: &mut dyn FnMut(usize, usize) -> usize,
    ) -> Result<LearningEpisode<T>, LearnError>;
}

/// Steps `(first, last)` backed up for an episode.
pub fn update_steps(
    range: UpdateRange,
    horizon: usize,
    tau: usize,
    last_reward_step: usize,
) -> Result<(usize, usize), LearnError> {
    let short = LearnError::EpisodeTooShort { horizon, tau };
    match range {
        UpdateRange::Full => {
            if horizon == 0 {
                return Err(short);
            }
            Ok((0, last_reward_step.min(horizon - 1)))
        }
        UpdateRange::Algorithm => {
            if horizon < 2 * tau + 1 {
                return Err(short);
            }
            Ok((tau, horizon - tau - 1))
        }
    }
}

fn combine<T: Scalar>(outer: Outer, a: T, b: T) -> T {
    match outer {
        Outer::Finally => a.max(b),
        Outer::Globally => a.min(b),
    }
}

/// Parameters of one backward sweep.
#[derive(Clone, Copy, Debug)]
pub struct Backup<T> {
    pub outer: Outer,
    pub gamma: T,
    pub alpha: AlphaSchedule<T>,
    pub blend: Blend,
    pub steps: (usize, usize),
}

/// Backward sweep over `steps`, in place. Only visited triples change.
pub fn update_q<T: Scalar>(
    q: &mut QTable<T>,
    ep: &LearningEpisode<T>,
    b: &Backup<T>,
) -> Result<(), LearnError> {
    let horizon = ep.horizon();
    if horizon != q.horizon() || ep.states.len() != horizon + 1 || ep.rewards.len() != horizon + 1 {
        return Err(LearnError::Shape(format!(
            "expected {} actions with one more state and reward each",
            q.horizon()
        )));
    }
    let (first, last) = b.steps;
    if last >= horizon || first > last {
        return Err(LearnError::Shape(format!("update steps {first}..={last} out of range")));
    }
    for n in (first..=last).rev() {
        let (s, a, k) = (ep.states[n], ep.actions[n], horizon - n);
        let future = (n < last).then(|| b.gamma * q.max_value(ep.states[n + 1], k - 1));
        let target = match (ep.rewards[n], future) {
            (Some(r), Some(f)) => combine(b.outer, r, f),
            (Some(r), None) => r,
            (None, Some(f)) => f,
            (None, None) => continue,
        };
        let alpha = match b.alpha {
            AlphaSchedule::Constant(a) => a,
            AlphaSchedule::PerVisit => T::one() / (T::one() + T::lit(q.visits(s, a, k) as f64)),
        };
        let old = q.get(s, a, k);
        let new = match b.blend {
            Blend::Standard => (T::one() - alpha) * old + alpha * target,
            Blend::Alg2 => (T::one() - alpha) * target + alpha * old,
        };
        q.set(s, a, k, new);
        q.record_visit(s, a, k);
    }
    Ok(())
}

/// One row of the training log.
#[derive(Clone, Debug, PartialEq)]
pub struct LogRow<T> {
    /// 1-based episode number.
    pub episode: usize,
    pub epsilon: T,
    /// `op` folded over the scored windows of the episode.
    pub episode_return: Option<T>,
    pub robustness: Option<T>,
    pub satisfied: Option<bool>,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<T> {
    pub q: QTable<T>,
    pub policy: Policy,
    pub log: Vec<LogRow<T>>,
    pub warnings: Vec<String>,
}

/// Batch Q-learning: random initialisation, then for each episode an
/// ε-greedy simulation followed by a backward sweep.
pub fn train<T: Scalar, S: EpisodeSource<T>>(
    source: &mut S,
    schedule: &LearningSchedule<T>,
) -> Result<TrainOutcome<T>, LearnError> {
    schedule.validate()?;
    let horizon = source.horizon();
    let steps = update_steps(
        schedule.update_range,
        horizon,
        source.tau(),
        source.last_reward_step(),
    )?;
    let mut init_rng = ChaCha8Rng::seed_from_u64(schedule.seed);
    let mut explore = ChaCha8Rng::seed_from_u64(schedule.seed);
    explore.set_stream(1);
    let mut q = QTable::random(
        source.n_states(),
        source.n_actions(),
        horizon,
        schedule.init,
        &mut init_rng,
    );
    let backup = Backup {
        outer: source.outer(),
        gamma: schedule.gamma,
        alpha: schedule.alpha,
        blend: schedule.blend,
        steps,
    };
    let n_actions = source.n_actions();
    let mut log = Vec::with_capacity(schedule.episodes);
    for e in 1..=schedule.episodes {
        let eps = schedule.epsilon(e);
        let ep = {
            let q = &q;
            let explore = &mut explore;
            let mut policy = |s: usize, k: usize| {
                if explore.gen::<f64>() < eps.as_f64() {
                    explore.gen_range(0..n_actions)
                } else {
                    q.argmax(s, k)
                }
            };
            source.simulate(&mut policy)?
        };
        update_q(&mut q, &ep, &backup)?;
        let episode_return = ep.rewards[steps.0..=steps.1]
            .iter()
            .flatten()
            .copied()
            .reduce(|a, b| combine(backup.outer, a, b));
        log.push(LogRow {
            episode: e,
            epsilon: eps,
            episode_return,
            robustness: ep.robustness,
            satisfied: ep.satisfied,
        });
    }
    let policy = greedy_policy(&q);
    Ok(TrainOutcome {
        q,
        policy,
        log,
        warnings: schedule.warnings(),
    })
}
