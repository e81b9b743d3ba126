use rand::Rng;

use crate::stl::Signal;
use crate::tau_mdp::{TauState, TauTracker};
use crate::Scalar;

use super::{step, Action, NoiseModel, RobotState, WorkspaceLayout};

/// A simulated trajectory `s^{0:T}` with its region trace.
#[derive(Clone, Debug, PartialEq)]
pub struct Episode<T> {
    /// `T + 1` samples of `(x, y)`.
    pub signal: Signal<T>,
    /// Dense cell index of every sample.
    pub cells: Vec<usize>,
    /// Tau-state after every sample.
    pub states: Vec<TauState>,
    /// `T` actions; `actions[t]` moves sample `t` to `t + 1`.
    pub actions: Vec<Action>,
}

impl<T> Episode<T> {
    pub fn horizon(&self) -> usize {
        self.actions.len()
    }
}

/// Runs `horizon` steps from the layout's initial position. The policy
/// sees the current tau-state and the time-to-go `horizon - t`.
pub fn rollout<T, R, P>(
    layout: &WorkspaceLayout<T>,
    noise: &NoiseModel<T>,
    tau: usize,
    horizon: usize,
    rng: &mut R,
    mut policy: P,
) -> Episode<T>
where
    T: Scalar,
    R: Rng + ?Sized,
    P: FnMut(&TauState, usize) -> Action,
{
    let mut state = RobotState::at(layout.initial());
    let first = layout.cell_index(layout.region_of(state.pos).expect("initial position inside"));
    let mut tracker = TauTracker::new(tau, first);
    let mut signal = Signal::empty(2);
    signal.push(&state.pos).expect("2-D sample");
    let mut cells = Vec::with_capacity(horizon + 1);
    let mut states = Vec::with_capacity(horizon + 1);
    let mut actions = Vec::with_capacity(horizon);
    cells.push(first);
    states.push(tracker.state().clone());
    for t in 0..horizon {
        let a = policy(tracker.state(), horizon - t);
        state = step(layout, noise, &state, a, rng);
        let c = layout.cell_index(layout.region_of(state.pos).expect("clamped inside"));
        tracker.push(c);
        signal.push(&state.pos).expect("2-D sample");
        cells.push(c);
        states.push(tracker.state().clone());
        actions.push(a);
    }
    Episode {
        signal,
        cells,
        states,
        actions,
    }
}
