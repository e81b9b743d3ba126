//! MDP over length-`tau` region histories.
//!
//! A state is the sequence of the last `tau` cells the robot occupied,
//! padded on the left with `ε` while fewer than `tau` samples exist. A
//! transition `h -> h'` is admissible when `h'` is `h` shifted left by one
//! with a new final cell adjacent (or equal) to the old final cell.

mod classify;
mod distance;
mod model;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::gridworld::QuotientGraph;

pub use classify::{classify, Class, SatisfyingSet};
pub use distance::{signed_distances, UNREACHABLE};
pub use model::{ExplicitModel, TransitionEntry};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TauError {
    #[error("tau must be at least 1")]
    ZeroTau,
    #[error("reachable tau-state count exceeds the cap of {cap}; shrink the partition or tau")]
    StateCap { cap: usize },
    #[error("malformed tau-state: {0}")]
    Malformed(String),
    #[error("formula window length {window} does not match tau = {tau}")]
    WindowMismatch { window: usize, tau: usize },
    #[error("signed distance undefined: {0}")]
    DegenerateSet(&'static str),
    #[error("transition model: {0}")]
    Model(String),
    #[error(transparent)]
    Stl(#[from] crate::stl::StlError),
}

/// Default cap on reachable states.
pub const DEFAULT_STATE_CAP: usize = 1_000_000;

/// Length-`tau` history of cell indices; `None` is the `ε` padding.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TauState(Vec<Option<usize>>);

impl TauState {
    /// Validates the `ε`-prefix shape.
    pub fn new(history: Vec<Option<usize>>) -> Result<Self, TauError> {
        if history.is_empty() {
            return Err(TauError::ZeroTau);
        }
        let first_cell = history.iter().position(Option::is_some);
        let ok = match first_cell {
            None => false,
            Some(k) => history[k..].iter().all(Option::is_some),
        };
        if !ok {
            return Err(TauError::Malformed(
                "ε entries must form a proper prefix followed by at least one cell".into(),
            ));
        }
        Ok(TauState(history))
    }

    /// `(ε, ..., ε, cell)`.
    pub fn initial(tau: usize, cell: usize) -> Self {
        let mut h = vec![None; tau];
        h[tau - 1] = Some(cell);
        TauState(h)
    }

    pub fn tau(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Option<usize>] {
        &self.0
    }

    pub fn last(&self) -> usize {
        self.0[self.0.len() - 1].expect("final entry is always a cell")
    }

    pub fn is_padded(&self) -> bool {
        self.0[0].is_none()
    }

    /// Cells after the `ε` prefix.
    pub fn cells(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().flatten().copied()
    }

    /// Drop the oldest entry and append `cell`.
    pub fn shifted(&self, cell: usize) -> TauState {
        let mut h = Vec::with_capacity(self.0.len());
        h.extend_from_slice(&self.0[1..]);
        h.push(Some(cell));
        TauState(h)
    }

    pub fn shift_in_place(&mut self, cell: usize) {
        self.0.rotate_left(1);
        let n = self.0.len();
        self.0[n - 1] = Some(cell);
    }

    /// Whether the non-`ε` suffix is a walk in the quotient.
    pub fn is_path(&self, graph: &QuotientGraph) -> bool {
        let cells: Vec<usize> = self.cells().collect();
        cells.windows(2).all(|w| graph.has_edge(w[0], w[1]))
    }

    /// Admissibility of `self -> next`.
    pub fn admits(&self, next: &TauState, graph: &QuotientGraph) -> bool {
        self.tau() == next.tau()
            && self.0[1..] == next.0[..next.0.len() - 1]
            && graph.has_edge(self.last(), next.last())
    }

    pub fn display<'a>(&'a self, graph: &'a QuotientGraph) -> impl fmt::Display + 'a {
        DisplayState { state: self, graph }
    }

    /// Inverse of [`TauState::display`]: entries `e` or `i:j` joined by `;`.
    pub fn parse(text: &str, graph: &QuotientGraph) -> Result<TauState, TauError> {
        let (nx, ny) = graph.dims();
        let mut h = Vec::new();
        for part in text.split(';') {
            let part = part.trim();
            if part == "e" {
                h.push(None);
                continue;
            }
            let cell = part
                .split_once(':')
                .and_then(|(i, j)| Some((i.parse::<usize>().ok()?, j.parse::<usize>().ok()?)))
                .filter(|&(i, j)| i < nx && j < ny)
                .ok_or_else(|| TauError::Malformed(format!("bad history entry `{part}`")))?;
            h.push(Some(graph.index(crate::gridworld::Cell::new(cell.0, cell.1))));
        }
        TauState::new(h)
    }
}

struct DisplayState<'a> {
    state: &'a TauState,
    graph: &'a QuotientGraph,
}

impl fmt::Display for DisplayState<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, e) in self.state.0.iter().enumerate() {
            if k > 0 {
                f.write_str(";")?;
            }
            match e {
                None => f.write_str("e")?,
                Some(c) => write!(f, "{}", self.graph.cell(*c))?,
            }
        }
        Ok(())
    }
}

/// Trace of the region sequence `regions[0..=t]` as a tau-state: the last
/// `tau` regions, `ε`-padded when `t + 1 < tau`.
pub fn trace(regions: &[usize], t: usize, tau: usize) -> TauState {
    assert!(tau >= 1 && t < regions.len(), "trace needs regions[0..=t] and tau >= 1");
    let mut h = vec![None; tau];
    let take = (t + 1).min(tau);
    for k in 0..take {
        h[tau - take + k] = Some(regions[t + 1 - take + k]);
    }
    TauState(h)
}

/// Interned reachable tau-states with their admissible successor lists.
#[derive(Clone, Debug)]
pub struct StateTable {
    tau: usize,
    states: Vec<TauState>,
    index: HashMap<TauState, usize>,
    successors: Vec<Vec<usize>>,
}

impl StateTable {
    /// Breadth-first enumeration from `(ε, ..., ε, c)` for each `c` in
    /// `initial` (seeded in the given order). Ids follow discovery order,
    /// expanding neighbours lexicographically by cell.
    pub fn enumerate_reachable(
        graph: &QuotientGraph,
        tau: usize,
        initial: &[usize],
        cap: usize,
    ) -> Result<StateTable, TauError> {
        if tau == 0 {
            return Err(TauError::ZeroTau);
        }
        if initial.is_empty() || initial.iter().any(|&c| c >= graph.node_count()) {
            return Err(TauError::Malformed("initial cells must be non-empty and inside the grid".into()));
        }
        let mut table = StateTable {
            tau,
            states: Vec::new(),
            index: HashMap::new(),
            successors: Vec::new(),
        };
        let mut queue = VecDeque::new();
        for &c in initial {
            let (id, fresh) = table.intern(TauState::initial(tau, c), cap)?;
            if fresh {
                queue.push_back(id);
            }
        }
        while let Some(id) = queue.pop_front() {
            let last = table.states[id].last();
            let mut succ = Vec::with_capacity(graph.neighbors(last).len());
            for &n in graph.neighbors(last) {
                let next = table.states[id].shifted(n);
                let (nid, fresh) = table.intern(next, cap)?;
                if fresh {
                    queue.push_back(nid);
                }
                succ.push(nid);
            }
            table.successors[id] = succ;
        }
        Ok(table)
    }

    fn intern(&mut self, s: TauState, cap: usize) -> Result<(usize, bool), TauError> {
        if let Some(&id) = self.index.get(&s) {
            return Ok((id, false));
        }
        if self.states.len() >= cap {
            return Err(TauError::StateCap { cap });
        }
        let id = self.states.len();
        self.index.insert(s.clone(), id);
        self.states.push(s);
        self.successors.push(Vec::new());
        Ok((id, true))
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, id: usize) -> &TauState {
        &self.states[id]
    }

    pub fn states(&self) -> &[TauState] {
        &self.states
    }

    pub fn id_of(&self, s: &TauState) -> Option<usize> {
        self.index.get(s).copied()
    }

    /// Admissible successor ids of `id`.
    pub fn successors(&self, id: usize) -> &[usize] {
        &self.successors[id]
    }

    pub fn successor_lists(&self) -> &[Vec<usize>] {
        &self.successors
    }

    /// The state reached from `id` when the robot ends in `cell`.
    pub fn step(&self, id: usize, cell: usize) -> Option<usize> {
        self.successors[id]
            .iter()
            .copied()
            .find(|&s| self.states[s].last() == cell)
    }
}

/// Incrementally maintained trace of a running trajectory.
#[derive(Clone, Debug)]
pub struct TauTracker {
    state: TauState,
}

impl TauTracker {
    pub fn new(tau: usize, first_cell: usize) -> Self {
        TauTracker {
            state: TauState::initial(tau, first_cell),
        }
    }

    pub fn push(&mut self, cell: usize) {
        self.state.shift_in_place(cell);
    }

    pub fn state(&self) -> &TauState {
        &self.state
    }
}
