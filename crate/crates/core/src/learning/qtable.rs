use rand::Rng;

use crate::Scalar;

/// Dense table over `(state, action, time_to_go)` with
/// `time_to_go = 0 ..= horizon`.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable<T> {
    n_states: usize,
    n_actions: usize,
    horizon: usize,
    values: Vec<T>,
    visits: Vec<u32>,
}

impl<T: Scalar> QTable<T> {
    pub fn constant(n_states: usize, n_actions: usize, horizon: usize, v: T) -> Self {
        let len = n_states * n_actions * (horizon + 1);
        QTable {
            n_states,
            n_actions,
            horizon,
            values: vec![v; len],
            visits: vec![0; len],
        }
    }

    /// Uniform on `[lo, hi]`, drawn in `(state, action, k)` order.
    pub fn random<R: Rng + ?Sized>(
        n_states: usize,
        n_actions: usize,
        horizon: usize,
        (lo, hi): (T, T),
        rng: &mut R,
    ) -> Self {
        let mut q = QTable::constant(n_states, n_actions, horizon, lo);
        if hi > lo {
            for v in &mut q.values {
                *v = rng.gen_range(lo..=hi);
            }
        }
        q
    }

    /// Builds a table from values in `(state, action, k)` order.
    pub fn from_values(n_states: usize, n_actions: usize, horizon: usize, values: Vec<T>) -> Option<Self> {
        let len = n_states * n_actions * (horizon + 1);
        (values.len() == len).then(|| QTable {
            n_states,
            n_actions,
            horizon,
            values,
            visits: vec![0; len],
        })
    }

    #[inline]
    fn idx(&self, s: usize, a: usize, k: usize) -> usize {
        debug_assert!(s < self.n_states && a < self.n_actions && k <= self.horizon);
        (s * self.n_actions + a) * (self.horizon + 1) + k
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn get(&self, s: usize, a: usize, k: usize) -> T {
        self.values[self.idx(s, a, k)]
    }

    pub fn set(&mut self, s: usize, a: usize, k: usize, v: T) {
        let i = self.idx(s, a, k);
        self.values[i] = v;
    }

    pub fn visits(&self, s: usize, a: usize, k: usize) -> u32 {
        self.visits[self.idx(s, a, k)]
    }

    pub(crate) fn record_visit(&mut self, s: usize, a: usize, k: usize) {
        let i = self.idx(s, a, k);
        self.visits[i] = self.visits[i].saturating_add(1);
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// First action with the largest value, in action order.
    pub fn argmax(&self, s: usize, k: usize) -> usize {
        let mut best = 0;
        let mut best_v = self.get(s, 0, k);
        for a in 1..self.n_actions {
            let v = self.get(s, a, k);
            if v > best_v {
                best = a;
                best_v = v;
            }
        }
        best
    }

    pub fn max_value(&self, s: usize, k: usize) -> T {
        self.get(s, self.argmax(s, k), k)
    }

    /// Largest absolute difference over `k` in `ks`.
    pub fn sup_distance(&self, other: &QTable<T>, ks: std::ops::RangeInclusive<usize>) -> T {
        assert_eq!(
            (self.n_states, self.n_actions, self.horizon),
            (other.n_states, other.n_actions, other.horizon),
            "tables of different shape"
        );
        let mut d = T::zero();
        for s in 0..self.n_states {
            for a in 0..self.n_actions {
                for k in ks.clone() {
                    d = d.max((self.get(s, a, k) - other.get(s, a, k)).abs());
                }
            }
        }
        d
    }
}

/// Greedy action per `(state, time_to_go)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Policy {
    n_states: usize,
    horizon: usize,
    actions: Vec<usize>,
}

impl Policy {
    pub fn from_actions(n_states: usize, horizon: usize, actions: Vec<usize>) -> Option<Policy> {
        (actions.len() == n_states * (horizon + 1)).then_some(Policy {
            n_states,
            horizon,
            actions,
        })
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn action(&self, s: usize, k: usize) -> usize {
        self.actions[s * (self.horizon + 1) + k]
    }
}

/// Argmax per `(state, k)`, ties going to the lowest action index.
pub fn greedy_policy<T: Scalar>(q: &QTable<T>) -> Policy {
    let mut actions = Vec::with_capacity(q.n_states() * (q.horizon() + 1));
    for s in 0..q.n_states() {
        for k in 0..=q.horizon() {
            actions.push(q.argmax(s, k));
        }
    }
    Policy {
        n_states: q.n_states(),
        horizon: q.horizon(),
        actions,
    }
}
