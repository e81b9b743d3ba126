use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::stl::Outer;
use crate::tau_mdp::ExplicitModel;
use crate::Scalar;

use super::{combine, EpisodeSource, LearnError, LearningEpisode, QTable};

fn check_shapes<T: Scalar>(model: &ExplicitModel<T>, rewards: &[T]) -> Result<(), LearnError> {
    if rewards.len() != model.n_states() {
        return Err(LearnError::Shape(format!(
            "{} rewards for {} states",
            rewards.len(),
            model.n_states()
        )));
    }
    Ok(())
}

/// One application of the backup operator `H` to `q`:
///
/// ```text
/// (Hq)(σ, a, 1) = r(σ)
/// (Hq)(σ, a, k) = Σ_σ' P(σ, a, σ') op(r(σ), γ max_b q(σ', b, k - 1)),  k >= 2
/// ```
///
/// Entries at `k = 0` are copied from `q`.
pub fn apply_h<T: Scalar>(
    model: &ExplicitModel<T>,
    rewards: &[T],
    outer: Outer,
    gamma: T,
    q: &QTable<T>,
) -> Result<QTable<T>, LearnError> {
    check_shapes(model, rewards)?;
    if q.n_states() != model.n_states() || q.n_actions() != model.n_actions() {
        return Err(LearnError::Shape("table does not match the model".into()));
    }
    let mut out = q.clone();
    for k in 1..=q.horizon() {
        fill_level(model, rewards, outer, gamma, q, &mut out, k)?;
    }
    Ok(out)
}

fn fill_level<T: Scalar>(
    model: &ExplicitModel<T>,
    rewards: &[T],
    outer: Outer,
    gamma: T,
    src: &QTable<T>,
    dst: &mut QTable<T>,
    k: usize,
) -> Result<(), LearnError> {
    for s in 0..model.n_states() {
        for a in 0..model.n_actions() {
            let law = model.law(s, a)?;
            let v = if k == 1 {
                rewards[s]
            } else {
                law.iter().fold(T::zero(), |acc, &(t, p)| {
                    acc + p * combine(outer, rewards[s], gamma * src.max_value(t, k - 1))
                })
            };
            dst.set(s, a, k, v);
        }
    }
    Ok(())
}

/// Exact finite-horizon backward induction over `k = 1 ..= horizon`;
/// level `k = 0` is zero.
pub fn value_iteration_oracle<T: Scalar>(
    model: &ExplicitModel<T>,
    rewards: &[T],
    outer: Outer,
    gamma: T,
    horizon: usize,
) -> Result<QTable<T>, LearnError> {
    check_shapes(model, rewards)?;
    let mut q = QTable::constant(model.n_states(), model.n_actions(), horizon, T::zero());
    for k in 1..=horizon {
        let prev = q.clone();
        fill_level(model, rewards, outer, gamma, &prev, &mut q, k)?;
    }
    Ok(q)
}

/// `(‖Hq1 − Hq2‖∞, γ ‖q1 − q2‖∞)`, both over `k = 1 ..= horizon`.
pub fn contraction_check<T: Scalar>(
    model: &ExplicitModel<T>,
    rewards: &[T],
    outer: Outer,
    gamma: T,
    q1: &QTable<T>,
    q2: &QTable<T>,
) -> Result<(T, T), LearnError> {
    if q1.horizon() != q2.horizon() {
        return Err(LearnError::Shape("tables of different horizon".into()));
    }
    let ks = 1..=q1.horizon();
    let h1 = apply_h(model, rewards, outer, gamma, q1)?;
    let h2 = apply_h(model, rewards, outer, gamma, q2)?;
    Ok((h1.sup_distance(&h2, ks.clone()), gamma * q1.sup_distance(q2, ks)))
}

/// Episodes drawn from an explicit model with per-state rewards; every
/// step before the last sample is scored.
#[derive(Clone, Debug)]
pub struct ModelEpisodes<T> {
    model: ExplicitModel<T>,
    rewards: Vec<T>,
    initial: usize,
    horizon: usize,
    outer: Outer,
    rng: ChaCha8Rng,
}

impl<T: Scalar> ModelEpisodes<T> {
    pub fn new(
        model: ExplicitModel<T>,
        rewards: Vec<T>,
        initial: usize,
        horizon: usize,
        outer: Outer,
        seed: u64,
    ) -> Result<Self, LearnError> {
        check_shapes(&model, &rewards)?;
        if !model.is_complete() {
            return Err(LearnError::Shape("model has unknown transitions".into()));
        }
        if initial >= model.n_states() {
            return Err(LearnError::Shape("initial state out of range".into()));
        }
        Ok(ModelEpisodes {
            model,
            rewards,
            initial,
            horizon,
            outer,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }
}

impl<T: Scalar> EpisodeSource<T> for ModelEpisodes<T> {
    fn n_states(&self) -> usize {
        self.model.n_states()
    }

    fn n_actions(&self) -> usize {
        self.model.n_actions()
    }

    fn horizon(&self) -> usize {
        self.horizon
    }

    fn tau(&self) -> usize {
        1
    }

    fn outer(&self) -> Outer {
        self.outer
    }

    fn last_reward_step(&self) -> usize {
        self.horizon.saturating_sub(1)
    }

    fn simulate(
        &mut self,
        policy: &mut dyn FnMut(usize, usize) -> usize,
    ) -> Result<LearningEpisode<T>, LearnError> {
        let mut states = vec![self.initial];
        let mut actions = Vec::with_capacity(self.horizon);
        let mut rewards = Vec::with_capacity(self.horizon + 1);
        let mut s = self.initial;
        for t in 0..self.horizon {
            let a = policy(s, self.horizon - t);
            rewards.push(Some(self.rewards[s]));
            s = self.model.sample(s, a, &mut self.rng)?;
            states.push(s);
            actions.push(a);
        }
        rewards.push(None);
        Ok(LearningEpisode {
            states,
            actions,
            rewards,
            robustness: None,
            satisfied: None,
        })
    }
}
