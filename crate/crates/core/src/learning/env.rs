use rand_chacha::ChaCha8Rng;

use crate::gridworld::{rollout, Action, Episode, NoiseModel, WorkspaceLayout};
use crate::stl::{robustness, satisfies, Formula, Outer, Signal, TopLevel};
use crate::tau_mdp::StateTable;
use crate::Scalar;

use super::{EpisodeSource, LearnError, LearningEpisode, ObjectiveKind};

/// Episodes of the grid robot scored against a top-level specification
/// `F[0,H) psi` or `G[0,H) psi`.
///
/// With `W = window_len(psi)`, the window ending at sample `n` is scored
/// for `n = W - 1 ..= H + W - 2`, i.e. `psi` is evaluated at `n - W + 1`.
pub struct GridworldEpisodes<'a, T> {
    layout: &'a WorkspaceLayout<T>,
    noise: &'a NoiseModel<T>,
    table: &'a StateTable,
    spec: &'a Formula<T>,
    top: TopLevel<T>,
    kind: ObjectiveKind,
    horizon: usize,
    rng: ChaCha8Rng,
}

impl<'a, T: Scalar> GridworldEpisodes<'a, T> {
    /// `table` must hold every state reachable from the layout's initial
    /// cell with `tau = window_len(psi)`.
    pub fn new(
        layout: &'a WorkspaceLayout<T>,
        noise: &'a NoiseModel<T>,
        table: &'a StateTable,
        spec: &'a Formula<T>,
        kind: ObjectiveKind,
        horizon: usize,
        rng: ChaCha8Rng,
    ) -> Result<Self, LearnError> {
        let top = spec.top_level()?;
        let tau = top.inner.window_len();
        if table.tau() != tau {
            return Err(crate::tau_mdp::TauError::WindowMismatch {
                window: tau,
                tau: table.tau(),
            }
            .into());
        }
        if horizon < tau {
            return Err(LearnError::EpisodeTooShort { horizon, tau });
        }
        Ok(GridworldEpisodes {
            layout,
            noise,
            table,
            spec,
            top,
            kind,
            horizon,
            rng,
        })
    }

    /// Episode length that covers the whole specification: `H + W - 1`.
    pub fn natural_horizon(spec: &Formula<T>) -> Result<usize, LearnError> {
        let top = spec.top_level()?;
        Ok(top.bound + top.inner.window_len() - 1)
    }

    fn window(&self) -> usize {
        self.top.inner.window_len()
    }

    /// Local reward of the window ending at sample `n`.
    pub fn reward(&self, signal: &Signal<T>, n: usize) -> Result<Option<T>, LearnError> {
        let w = self.window();
        if n + 1 < w || n > self.last_reward_step() || n >= signal.len() {
            return Ok(None);
        }
        let t0 = n + 1 - w;
        Ok(Some(match self.kind {
            ObjectiveKind::MaxRobustness => robustness(signal, &self.top.inner, t0)?,
            ObjectiveKind::MaxProbability => {
                if satisfies(signal, &self.top.inner, t0)? {
                    T::one()
                } else {
                    T::zero()
                }
            }
        }))
    }

    /// Runs one rollout and converts it; also returns the raw episode.
    pub fn simulate_raw(
        &mut self,
        policy: &mut dyn FnMut(usize, usize) -> usize,
    ) -> Result<(Episode<T>, LearningEpisode<T>), LearnError> {
        let table = self.table;
        let ep = rollout(
            self.layout,
            self.noise,
            self.window(),
            self.horizon,
            &mut self.rng,
            |s, k| {
                let id = table.id_of(s).expect("rollout state enumerated from the initial cell");
                Action::from_index(policy(id, k)).expect("action index below 4")
            },
        );
        let states = ep
            .states
            .iter()
            .map(|s| table.id_of(s).expect("rollout state enumerated from the initial cell"))
            .collect();
        let rewards = (0..=self.horizon)
            .map(|n| self.reward(&ep.signal, n))
            .collect::<Result<_, _>>()?;
        let (robustness, satisfied) = if ep.signal.len() >= self.spec.window_len() {
            (
                Some(robustness(&ep.signal, self.spec, 0)?),
                Some(satisfies(&ep.signal, self.spec, 0)?),
            )
        } else {
            (None, None)
        };
        let learning = LearningEpisode {
            states,
            actions: ep.actions.iter().map(|a| a.index()).collect(),
            rewards,
            robustness,
            satisfied,
        };
        Ok((ep, learning))
    }
}

impl<T: Scalar> EpisodeSource<T> for GridworldEpisodes<'_, T> {
    fn n_states(&self) -> usize {
        self.table.len()
    }

    fn n_actions(&self) -> usize {
        Action::ALL.len()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn tau(&self) -> usize {
        self.window()
    }

    fn outer(&self) -> Outer {
        self.top.outer
    }

    fn last_reward_step(&self) -> usize {
        self.top.bound + self.window() - 2
    }

    fn simulate(
        &mut self,
        policy: &mut dyn FnMut(usize, usize) -> usize,
    ) -> Result<LearningEpisode<T>, LearnError> {
        Ok(self.simulate_raw(policy)?.1)
    }
}
