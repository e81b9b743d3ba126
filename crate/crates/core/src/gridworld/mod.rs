//! Noisy grid robot on a partitioned rectangular workspace.
//!
//! The workspace is split into square cells of side `pitch`. Cells are
//! half-open: a point on a shared edge belongs to the cell to its right or
//! above, except on the outer `x_max` / `y_max` edges which belong to the
//! last column / row. Each action aims the robot at the centre of the
//! neighbouring cell in that direction, perturbs the heading uniformly by
//! at most `delta_theta`, moves `step_length`, and clamps to the domain.

mod quotient;
mod rollout;

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::stl::{Formula, Predicate, Relation};
use crate::Scalar;

pub use quotient::QuotientGraph;
pub use rollout::{rollout, Episode};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("invalid layout: {0}")]
    Layout(String),
    #[error("invalid noise model: {0}")]
    Noise(String),
    #[error("position ({x}, {y}) lies outside the workspace")]
    OutOfBounds { x: f64, y: f64 },
    #[error("no cell is labelled `{0}`")]
    UnknownLabel(String),
}

/// Cell `(i, j)`: column `i` from the left, row `j` from the bottom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
}

impl Cell {
    pub const fn new(i: usize, j: usize) -> Self {
        Cell { i, j }
    }

    /// 4-neighbours or identical.
    pub fn touches(&self, other: &Cell) -> bool {
        self.i.abs_diff(other.i) + self.j.abs_diff(other.j) <= 1
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.i, self.j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Up,
    Down,
    Left,
    Right,
}

impl Action {
    /// Fixed order; greedy tie-breaking follows it.
    pub const ALL: [Action; 4] = [Action::Up, Action::Down, Action::Left, Action::Right];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Action> {
        Action::ALL.get(i).copied()
    }

    fn delta(self) -> (i64, i64) {
        match self {
            Action::Up => (0, 1),
            Action::Down => (0, -1),
            Action::Left => (-1, 0),
            Action::Right => (1, 0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Action::Up => "up",
            Action::Down => "down",
            Action::Left => "left",
            Action::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Option<Action> {
        Action::ALL.into_iter().find(|a| a.name() == s)
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WorkspaceLayout<T> {
    x_min: T,
    x_max: T,
    y_min: T,
    y_max: T,
    pitch: T,
    nx: usize,
    ny: usize,
    labels: BTreeMap<Cell, String>,
    initial: [T; 2],
}

impl<T: Scalar> WorkspaceLayout<T> {
    pub fn new(x: (T, T), y: (T, T), pitch: T, initial: [T; 2]) -> Result<Self, EnvError> {
        if !(pitch > T::zero()) || !pitch.is_finite() {
            return Err(EnvError::Layout("cell pitch must be positive".into()));
        }
        let count = |lo: T, hi: T, axis: &str| -> Result<usize, EnvError> {
            let n = (hi - lo) / pitch;
            let r = n.round();
            if !(hi > lo) || (n - r).abs() > T::lit(1e-9) * r.max(T::one()) {
                return Err(EnvError::Layout(format!(
                    "{axis} extent must be a positive whole number of cells"
                )));
            }
            Ok(r.as_f64() as usize)
        };
        let nx = count(x.0, x.1, "x")?;
        let ny = count(y.0, y.1, "y")?;
        let layout = WorkspaceLayout {
            x_min: x.0,
            x_max: x.1,
            y_min: y.0,
            y_max: y.1,
            pitch,
            nx,
            ny,
            labels: BTreeMap::new(),
            initial,
        };
        if !layout.contains(initial) {
            return Err(EnvError::Layout("initial position lies outside the workspace".into()));
        }
        Ok(layout)
    }

    /// The 6x6 unit-cell workspace `[0,6]^2` with blue cells (2,2), (4,4),
    /// green cells (2,4), (4,2), starting at the centre of cell (0,0).
    pub fn default_case_study() -> Self {
        let mut l = WorkspaceLayout::new(
            (T::zero(), T::lit(6.0)),
            (T::zero(), T::lit(6.0)),
            T::one(),
            [T::lit(0.5), T::lit(0.5)],
        )
        .expect("default layout is valid");
        for (c, lab) in [((2, 2), "blue"), ((4, 4), "blue"), ((2, 4), "green"), ((4, 2), "green")] {
            l.set_label(Cell::new(c.0, c.1), lab).expect("cell inside grid");
        }
        l
    }

    pub fn set_label(&mut self, cell: Cell, label: &str) -> Result<(), EnvError> {
        if cell.i >= self.nx || cell.j >= self.ny {
            return Err(EnvError::Layout(format!("labelled cell {cell} outside the grid")));
        }
        self.labels.insert(cell, label.to_string());
        Ok(())
    }

    pub fn set_initial(&mut self, p: [T; 2]) -> Result<(), EnvError> {
        if !self.contains(p) {
            return Err(EnvError::Layout("initial position lies outside the workspace".into()));
        }
        self.initial = p;
        Ok(())
    }

    pub fn initial(&self) -> [T; 2] {
        self.initial
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn pitch(&self) -> T {
        self.pitch
    }

    pub fn x_bounds(&self) -> (T, T) {
        (self.x_min, self.x_max)
    }

    pub fn y_bounds(&self) -> (T, T) {
        (self.y_min, self.y_max)
    }

    pub fn labels(&self) -> &BTreeMap<Cell, String> {
        &self.labels
    }

    pub fn label_of(&self, cell: Cell) -> Option<&str> {
        self.labels.get(&cell).map(String::as_str)
    }

    pub fn cell_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.nx).flat_map(move |i| (0..self.ny).map(move |j| Cell::new(i, j)))
    }

    pub fn contains(&self, p: [T; 2]) -> bool {
        p[0] >= self.x_min && p[0] <= self.x_max && p[1] >= self.y_min && p[1] <= self.y_max
    }

    /// Dense index `j * nx + i`.
    pub fn cell_index(&self, c: Cell) -> usize {
        c.j * self.nx + c.i
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        Cell::new(index % self.nx, index / self.nx)
    }

    fn axis_index(&self, v: T, lo: T, n: usize) -> usize {
        let k = ((v - lo) / self.pitch).floor().as_f64();
        (k.max(0.0) as usize).min(n - 1)
    }

    /// Cell containing `p`.
    pub fn region_of(&self, p: [T; 2]) -> Result<Cell, EnvError> {
        if !self.contains(p) {
            return Err(EnvError::OutOfBounds {
                x: p[0].as_f64(),
                y: p[1].as_f64(),
            });
        }
        Ok(Cell::new(
            self.axis_index(p[0], self.x_min, self.nx),
            self.axis_index(p[1], self.y_min, self.ny),
        ))
    }

    /// Closed box `[lo, hi]` of a cell.
    pub fn cell_box(&self, c: Cell) -> ([T; 2], [T; 2]) {
        let p = self.pitch;
        let lo = [
            self.x_min + T::lit(c.i as f64) * p,
            self.y_min + T::lit(c.j as f64) * p,
        ];
        (lo, [lo[0] + p, lo[1] + p])
    }

    pub fn cell_center(&self, c: Cell) -> [T; 2] {
        self.virtual_center(c.i as i64, c.j as i64)
    }

    fn virtual_center(&self, i: i64, j: i64) -> [T; 2] {
        let half = T::lit(0.5);
        [
            self.x_min + (T::lit(i as f64) + half) * self.pitch,
            self.y_min + (T::lit(j as f64) + half) * self.pitch,
        ]
    }

    /// Disjunction of the open boxes of every cell carrying `label`, as a
    /// 2-D formula over `(x, y)`.
    pub fn label_formula(&self, label: &str) -> Result<Formula<T>, EnvError> {
        self.labels
            .iter()
            .filter(|(_, l)| l.as_str() == label)
            .map(|(&c, _)| {
                let (lo, hi) = self.cell_box(c);
                let p = |axis, rel, d| Formula::pred(Predicate::axis(2, axis, rel, d));
                p(0, Relation::Greater, lo[0])
                    .and(p(0, Relation::Less, hi[0]))
                    .and(p(1, Relation::Greater, lo[1]))
                    .and(p(1, Relation::Less, hi[1]))
            })
            .reduce(Formula::or)
            .ok_or_else(|| EnvError::UnknownLabel(label.to_string()))
    }

    /// Clamp one coordinate into column/row `k` along an axis, keeping it
    /// strictly below the upper edge so it stays in that cell.
    fn clamp_into(&self, v: T, axis: usize, k: usize) -> T {
        let (lo_edge, n) = if axis == 0 {
            (self.x_min, self.nx)
        } else {
            (self.y_min, self.ny)
        };
        let lo = lo_edge + T::lit(k as f64) * self.pitch;
        let hi = lo + self.pitch;
        let mut out = v.max(lo).min(hi);
        let tiny = hi.abs().max(T::one()) * T::epsilon();
        let mut guard = 0;
        while self.axis_index(out, lo_edge, n) != k && guard < 64 {
            out = if self.axis_index(out, lo_edge, n) > k {
                out - tiny
            } else {
                out + tiny
            };
            guard += 1;
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeadingNoise {
    /// Heading uniform on `[theta_des - delta_theta, theta_des + delta_theta]`.
    Uniform,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel<T> {
    pub delta_theta: T,
    /// Distance covered per step, `v * delta`.
    pub step_length: T,
    pub distribution: HeadingNoise,
}

impl<T: Scalar> NoiseModel<T> {
    pub fn new(delta_theta: T, step_length: T) -> Result<Self, EnvError> {
        let quarter = T::lit(std::f64::consts::FRAC_PI_4);
        if !(delta_theta >= T::zero() && delta_theta < quarter) {
            return Err(EnvError::Noise("heading noise must lie in [0, pi/4)".into()));
        }
        if !(step_length > T::zero()) || !step_length.is_finite() {
            return Err(EnvError::Noise("step length must be positive".into()));
        }
        Ok(NoiseModel {
            delta_theta,
            step_length,
            distribution: HeadingNoise::Uniform,
        })
    }

    /// `delta_theta = pi/9`, one cell per step.
    pub fn default_case_study() -> Self {
        NoiseModel::new(T::lit(std::f64::consts::PI / 9.0), T::one()).expect("valid defaults")
    }

    pub fn noiseless(step_length: T) -> Self {
        NoiseModel::new(T::zero(), step_length).expect("valid step length")
    }

    fn sample_heading<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        match self.distribution {
            HeadingNoise::Uniform => rng.gen_range(-self.delta_theta..=self.delta_theta),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobotState<T> {
    pub pos: [T; 2],
    pub t: usize,
}

impl<T: Scalar> RobotState<T> {
    pub fn at(pos: [T; 2]) -> Self {
        RobotState { pos, t: 0 }
    }
}

/// One motion primitive. Exactly one heading sample is drawn per call.
///
/// The end cell is always the start cell or one of its 4-neighbours when
/// `step_length <= pitch`: a move that would clip a cell corner into a
/// diagonal neighbour has its sideways coordinate held in the start
/// column (for `up`/`down`) or row (for `left`/`right`).
pub fn step<T: Scalar, R: Rng + ?Sized>(
    layout: &WorkspaceLayout<T>,
    noise: &NoiseModel<T>,
    state: &RobotState<T>,
    action: Action,
    rng: &mut R,
) -> RobotState<T> {
    let start = layout
        .region_of(state.pos)
        .expect("robot state inside the workspace");
    let (di, dj) = action.delta();
    let target = layout.virtual_center(start.i as i64 + di, start.j as i64 + dj);
    let [x, y] = state.pos;
    let heading = (target[1] - y).atan2(target[0] - x) + noise.sample_heading(rng);
    let mut pos = [
        (x + noise.step_length * heading.cos()).max(layout.x_min).min(layout.x_max),
        (y + noise.step_length * heading.sin()).max(layout.y_min).min(layout.y_max),
    ];
    let end = layout.region_of(pos).expect("clamped position inside");
    if end.i.abs_diff(start.i) == 1 && end.j.abs_diff(start.j) == 1 {
        if di == 0 {
            pos[0] = layout.clamp_into(pos[0], 0, start.i);
        } else {
            pos[1] = layout.clamp_into(pos[1], 1, start.j);
        }
    }
    RobotState {
        pos,
        t: state.t + 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn unit_grid(n: usize) -> WorkspaceLayout<f64> {
        WorkspaceLayout::new((0.0, n as f64), (0.0, n as f64), 1.0, [0.5, 0.5]).unwrap()
    }

    #[test]
    fn zero_noise_axis_move() {
        let l = unit_grid(6);
        let n = NoiseModel::noiseless(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = step(&l, &n, &RobotState::at([0.5, 0.5]), Action::Right, &mut rng);
        assert!((s.pos[0] - 1.5).abs() < 1e-12 && (s.pos[1] - 0.5).abs() < 1e-12);
        assert_eq!(s.t, 1);
    }

    #[test]
    fn boundary_clamp() {
        let l = unit_grid(6);
        let n = NoiseModel::noiseless(1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = step(&l, &n, &RobotState::at([0.5, 0.5]), Action::Left, &mut rng);
        assert_eq!(s.pos[0], 0.0);
        assert!((s.pos[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn region_lookup() {
        let l = unit_grid(6);
        assert_eq!(l.region_of([2.4, 2.9]).unwrap(), Cell::new(2, 2));
        assert_eq!(l.region_of([3.0, 2.5]).unwrap(), Cell::new(3, 2));
        assert_eq!(l.region_of([6.0, 6.0]).unwrap(), Cell::new(5, 5));
        assert!(matches!(l.region_of([6.1, 1.0]), Err(EnvError::OutOfBounds { .. })));
        assert!(l.region_of([-0.1, 1.0]).is_err());
    }

    #[test]
    fn layout_validation() {
        assert!(WorkspaceLayout::new((0.0, 5.5), (0.0, 6.0), 1.0, [0.5, 0.5]).is_err());
        assert!(WorkspaceLayout::new((0.0, 6.0), (0.0, 6.0), 0.0, [0.5, 0.5]).is_err());
        assert!(WorkspaceLayout::new((0.0, 6.0), (0.0, 6.0), 1.0, [7.0, 0.5]).is_err());
        let l = WorkspaceLayout::new((-1.0, 1.0), (0.0, 3.0), 0.5, [0.0, 0.0]).unwrap();
        assert_eq!((l.nx(), l.ny()), (4, 6));
        let mut l = unit_grid(2);
        assert!(l.set_label(Cell::new(2, 0), "blue").is_err());
    }

    #[test]
    fn noise_validation() {
        assert!(NoiseModel::new(0.8f64, 1.0).is_err());
        assert!(NoiseModel::new(-0.1f64, 1.0).is_err());
        assert!(NoiseModel::new(0.1f64, 0.0).is_err());
    }

    #[test]
    fn label_formula_matches_cells() {
        let l = WorkspaceLayout::<f64>::default_case_study();
        let blue = l.label_formula("blue").unwrap();
        assert_eq!(
            blue.to_string(),
            "((((x > 2 & x < 3) & y > 2) & y < 3) | (((x > 4 & x < 5) & y > 4) & y < 5))"
        );
        assert!(l.label_formula("red").is_err());
    }

    #[test]
    fn corner_clip_stays_four_adjacent() {
        // from the top-left corner of (0,0), aiming right, heading noise can
        // otherwise carry the robot into (1,1)
        let l = unit_grid(6);
        let n = NoiseModel::new(0.349, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let s = step(&l, &n, &RobotState::at([0.01, 0.99]), Action::Right, &mut rng);
            let c = l.region_of(s.pos).unwrap();
            assert!(c.touches(&Cell::new(0, 0)), "{c:?}");
        }
    }

    #[test]
    fn action_codes() {
        for (k, a) in Action::ALL.iter().enumerate() {
            assert_eq!(a.index(), k);
            assert_eq!(Action::from_index(k), Some(*a));
            assert_eq!(Action::parse(a.name()), Some(*a));
        }
    }
}
