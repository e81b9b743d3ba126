use std::fmt;

use crate::gridworld::WorkspaceLayout;
use crate::stl::{robustness_bounds, Formula};
use crate::Scalar;

use super::{StateTable, TauError, TauState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    Sat,
    Unsat,
    Mixed,
}

impl Class {
    pub fn name(self) -> &'static str {
        match self {
            Class::Sat => "SAT",
            Class::Unsat => "UNSAT",
            Class::Mixed => "MIXED",
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Classifies a tau-state by bounding the robustness of `psi` over every
/// trajectory whose `k`-th sample lies in the closed box of the `k`-th cell.
///
/// With bounds `[lo, hi]`: `Mixed` when `lo < 0 < hi`, `Sat` when `lo >= 0`
/// and `hi > 0`, otherwise `Unsat`. A zero lower bound can only be attained
/// on a cell boundary. `ε`-prefixed states are `Unsat`.
pub fn classify<T: Scalar>(
    state: &TauState,
    psi: &Formula<T>,
    layout: &WorkspaceLayout<T>,
) -> Result<Class, TauError> {
    let tau = state.tau();
    if psi.window_len() != tau {
        return Err(TauError::WindowMismatch {
            window: psi.window_len(),
            tau,
        });
    }
    if state.is_padded() {
        return Ok(Class::Unsat);
    }
    let mut lower = Vec::with_capacity(tau);
    let mut upper = Vec::with_capacity(tau);
    for c in state.cells() {
        if c >= layout.cell_count() {
            return Err(TauError::Malformed(format!("cell index {c} outside the layout")));
        }
        let (lo, hi) = layout.cell_box(layout.cell_at(c));
        lower.push(lo.to_vec());
        upper.push(hi.to_vec());
    }
    let b = robustness_bounds(&lower, &upper, psi)?;
    let zero = T::zero();
    Ok(if b.lo < zero && b.hi > zero {
        Class::Mixed
    } else if b.lo >= zero && b.hi > zero {
        Class::Sat
    } else {
        Class::Unsat
    })
}

/// Classification of every state of a table; `A` is the `Sat` class.
#[derive(Clone, Debug)]
pub struct SatisfyingSet {
    classes: Vec<Class>,
}

impl SatisfyingSet {
    pub fn build<T: Scalar>(
        table: &StateTable,
        psi: &Formula<T>,
        layout: &WorkspaceLayout<T>,
    ) -> Result<Self, TauError> {
        let classes = table
            .states()
            .iter()
            .map(|s| classify(s, psi, layout))
            .collect::<Result<_, _>>()?;
        Ok(SatisfyingSet { classes })
    }

    pub fn from_classes(classes: Vec<Class>) -> Self {
        SatisfyingSet { classes }
    }

    pub fn class(&self, id: usize) -> Class {
        self.classes[id]
    }

    pub fn classes(&self) -> &[Class] {
        &self.classes
    }

    pub fn contains(&self, id: usize) -> bool {
        self.classes[id] == Class::Sat
    }

    /// Membership mask of `A` by state id.
    pub fn mask(&self) -> Vec<bool> {
        self.classes.iter().map(|&c| c == Class::Sat).collect()
    }

    pub fn count(&self, class: Class) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }
}
