use rand::Rng;

use crate::Scalar;

use super::{StateTable, TauError};

/// Transition law of one `(state, action)` pair.
#[derive(Clone, Debug, PartialEq)]
pub enum TransitionEntry<T> {
    /// Learning mode: the law is not available.
    Unknown,
    /// `(successor id, probability)` pairs.
    Known(Vec<(usize, T)>),
}

/// Transition model over interned state ids with a fixed action count.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitModel<T> {
    n_states: usize,
    n_actions: usize,
    entries: Vec<TransitionEntry<T>>,
}

impl<T: Scalar> ExplicitModel<T> {
    /// Every entry `Unknown`.
    pub fn unknown(n_states: usize, n_actions: usize) -> Self {
        ExplicitModel {
            n_states,
            n_actions,
            entries: vec![TransitionEntry::Unknown; n_states * n_actions],
        }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn get(&self, state: usize, action: usize) -> &TransitionEntry<T> {
        &self.entries[state * self.n_actions + action]
    }

    /// Sets a known law after checking it is a distribution.
    pub fn set(
        &mut self,
        state: usize,
        action: usize,
        probs: Vec<(usize, T)>,
    ) -> Result<(), TauError> {
        if state >= self.n_states || action >= self.n_actions {
            return Err(TauError::Model(format!("pair ({state}, {action}) out of range")));
        }
        let mut sum = 0.0;
        for &(s, p) in &probs {
            if s >= self.n_states {
                return Err(TauError::Model(format!("successor {s} out of range")));
            }
            if !(p >= T::zero()) {
                return Err(TauError::Model(format!("negative probability at ({state}, {action})")));
            }
            sum += p.as_f64();
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(TauError::Model(format!(
                "probabilities at ({state}, {action}) sum to {sum}"
            )));
        }
        self.entries[state * self.n_actions + action] = TransitionEntry::Known(probs);
        Ok(())
    }

    /// Known law of a pair, or an error naming it.
    pub fn law(&self, state: usize, action: usize) -> Result<&[(usize, T)], TauError> {
        match self.get(state, action) {
            TransitionEntry::Known(p) => Ok(p),
            TransitionEntry::Unknown => Err(TauError::Model(format!(
                "transition ({state}, {action}) is unknown"
            ))),
        }
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(|e| matches!(e, TransitionEntry::Known(_)))
    }

    /// Checks every positive-probability successor against the admissible
    /// successors of `table`.
    pub fn check_admissible(&self, table: &StateTable) -> Result<(), TauError> {
        if table.len() != self.n_states {
            return Err(TauError::Model("state count differs from the table".into()));
        }
        for s in 0..self.n_states {
            for a in 0..self.n_actions {
                if let TransitionEntry::Known(p) = self.get(s, a) {
                    if let Some(&(t, _)) = p
                        .iter()
                        .find(|&&(t, p)| p > T::zero() && !table.successors(s).contains(&t))
                    {
                        return Err(TauError::Model(format!(
                            "transition {s} -> {t} is not admissible"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Random laws supported on the admissible successors of each state.
    pub fn random<R: Rng + ?Sized>(table: &StateTable, n_actions: usize, rng: &mut R) -> Self {
        let mut m = ExplicitModel::unknown(table.len(), n_actions);
        for s in 0..table.len() {
            for a in 0..n_actions {
                let w: Vec<f64> = table.successors(s).iter().map(|_| rng.gen::<f64>() + 1e-3).collect();
                let total: f64 = w.iter().sum();
                let probs = table
                    .successors(s)
                    .iter()
                    .zip(&w)
                    .map(|(&t, &x)| (t, T::lit(x / total)))
                    .collect();
                m.entries[s * n_actions + a] = TransitionEntry::Known(probs);
            }
        }
        m
    }

    /// Draws a successor of a known pair.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        state: usize,
        action: usize,
        rng: &mut R,
    ) -> Result<usize, TauError> {
        let law = self.law(state, action)?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for &(t, p) in law {
            acc += p.as_f64();
            if u < acc {
                return Ok(t);
            }
        }
        law.iter()
            .rev()
            .find(|&&(_, p)| p > T::zero())
            .map(|&(t, _)| t)
            .ok_or_else(|| TauError::Model(format!("empty law at ({state}, {action})")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridworld::QuotientGraph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn validation() {
        let mut m = ExplicitModel::<f64>::unknown(2, 1);
        assert!(m.set(0, 0, vec![(0, 0.5), (1, 0.5)]).is_ok());
        assert!(m.set(1, 0, vec![(0, 0.5), (1, 0.6)]).is_err());
        assert!(m.set(1, 0, vec![(2, 1.0)]).is_err());
        assert!(m.set(1, 0, vec![(0, 1.0 + 1e-12)]).is_ok());
        assert!(m.is_complete());
        assert!(ExplicitModel::<f64>::unknown(1, 1).law(0, 0).is_err());
    }

    #[test]
    fn random_models_are_admissible() {
        let g = QuotientGraph::grid(2, 2);
        let t = StateTable::enumerate_reachable(&g, 2, &[0], super::super::DEFAULT_STATE_CAP).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = ExplicitModel::<f64>::random(&t, 4, &mut rng);
        m.check_admissible(&t).unwrap();
        for s in 0..t.len() {
            let next = m.sample(s, 1, &mut rng).unwrap();
            assert!(t.successors(s).contains(&next));
        }
        let mut bad = ExplicitModel::<f64>::unknown(t.len(), 1);
        let not_succ = (0..t.len()).find(|x| !t.successors(0).contains(x)).unwrap();
        bad.set(0, 0, vec![(not_succ, 1.0)]).unwrap();
        assert!(bad.check_admissible(&t).is_err());
    }
}
