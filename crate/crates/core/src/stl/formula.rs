use std::fmt;

use crate::Scalar;

use super::StlError;

/// Half-open integer sample interval `[start, end)` with `end > start`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    start: usize,
    end: usize,
}

impl Interval {
    pub fn new(start: usize, end: usize) -> Result<Self, StlError> {
        if end <= start {
            return Err(StlError::EmptyInterval { start, end });
        }
        Ok(Interval { start, end })
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    /// Absolute sample indices covered when anchored at `t`.
    pub fn shifted(&self, t: usize) -> std::ops::Range<usize> {
        t + self.start..t + self.end
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{},{})", self.start, self.end)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `f(s) < d`
    Less,
    /// `f(s) > d`, the negation of `f(s) < d` up to the boundary.
    Greater,
}

/// Affine predicate `coeffs . s + offset  (<|>)  threshold`.
#[derive(Clone, Debug, PartialEq)]
pub struct Predicate<T> {
    pub coeffs: Vec<T>,
    pub offset: T,
    pub threshold: T,
    pub relation: Relation,
}

impl<T: Scalar> Predicate<T> {
    pub fn new(coeffs: Vec<T>, offset: T, relation: Relation, threshold: T) -> Self {
        Predicate {
            coeffs,
            offset,
            threshold,
            relation,
        }
    }

    /// `x_axis < threshold` on a `dim`-dimensional signal.
    pub fn axis(dim: usize, axis: usize, relation: Relation, threshold: T) -> Self {
        let mut coeffs = vec![T::zero(); dim];
        coeffs[axis] = T::one();
        Predicate::new(coeffs, T::zero(), relation, threshold)
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    /// Value of the affine left-hand side at one sample.
    pub fn lhs(&self, sample: &[T]) -> T {
        self.coeffs
            .iter()
            .zip(sample)
            .fold(self.offset, |acc, (&c, &v)| acc + c * v)
    }

    /// Range of the left-hand side over an axis-aligned box.
    pub fn lhs_bounds(&self, lo: &[T], hi: &[T]) -> (T, T) {
        let mut min = self.offset;
        let mut max = self.offset;
        for ((&c, &l), &h) in self.coeffs.iter().zip(lo).zip(hi) {
            let (a, b) = (c * l, c * h);
            min = min + a.min(b);
            max = max + a.max(b);
        }
        (min, max)
    }

    pub fn robustness(&self, sample: &[T]) -> T {
        let f = self.lhs(sample);
        match self.relation {
            Relation::Less => self.threshold - f,
            Relation::Greater => f - self.threshold,
        }
    }

    pub fn holds(&self, sample: &[T]) -> bool {
        let f = self.lhs(sample);
        match self.relation {
            Relation::Less => f < self.threshold,
            Relation::Greater => f > self.threshold,
        }
    }

    /// Robustness range over a box of states.
    pub fn robustness_bounds(&self, lo: &[T], hi: &[T]) -> (T, T) {
        let (fmin, fmax) = self.lhs_bounds(lo, hi);
        match self.relation {
            Relation::Less => (self.threshold - fmax, self.threshold - fmin),
            Relation::Greater => (fmin - self.threshold, fmax - self.threshold),
        }
    }

    fn write_with(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        let mut wrote = false;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == T::zero() {
                continue;
            }
            let name = names
                .get(i)
                .cloned()
                .unwrap_or_else(|| super::default_var_name(i));
            let mag = c.abs();
            let neg = c < T::zero();
            match (wrote, neg) {
                (false, false) => {}
                (false, true) => write!(f, "-")?,
                (true, false) => write!(f, " + ")?,
                (true, true) => write!(f, " - ")?,
            }
            if mag == T::one() {
                write!(f, "{name}")?;
            } else {
                write!(f, "{mag}*{name}")?;
            }
            wrote = true;
        }
        if self.offset != T::zero() || !wrote {
            if wrote {
                let sign = if self.offset < T::zero() { "-" } else { "+" };
                write!(f, " {sign} {}", self.offset.abs())?;
            } else {
                write!(f, "{}", self.offset)?;
            }
        }
        let rel = match self.relation {
            Relation::Less => "<",
            Relation::Greater => ">",
        };
        write!(f, " {rel} {}", self.threshold)
    }
}

/// Abstract syntax of the supported STL fragment.
#[derive(Clone, Debug, PartialEq)]
pub enum Formula<T> {
    Predicate(Predicate<T>),
    Not(Box<Formula<T>>),
    And(Box<Formula<T>>, Box<Formula<T>>),
    Or(Box<Formula<T>>, Box<Formula<T>>),
    Finally(Interval, Box<Formula<T>>),
    Globally(Interval, Box<Formula<T>>),
    Until(Interval, Box<Formula<T>>, Box<Formula<T>>),
}

/// Outer operator of a top-level specification `F[0,T) psi` / `G[0,T) psi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outer {
    Finally,
    Globally,
}

/// A validated top-level specification split into outer operator, bound
/// and inner formula.
#[derive(Clone, Debug, PartialEq)]
pub struct TopLevel<T> {
    pub outer: Outer,
    pub bound: usize,
    pub inner: Formula<T>,
}

impl<T: Scalar> Formula<T> {
    pub fn pred(p: Predicate<T>) -> Self {
        Formula::Predicate(p)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        Formula::Not(Box::new(self))
    }

    pub fn and(self, rhs: Self) -> Self {
        Formula::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Self) -> Self {
        Formula::Or(Box::new(self), Box::new(rhs))
    }

    pub fn finally(interval: Interval, inner: Self) -> Self {
        Formula::Finally(interval, Box::new(inner))
    }

    pub fn globally(interval: Interval, inner: Self) -> Self {
        Formula::Globally(interval, Box::new(inner))
    }

    pub fn until(interval: Interval, lhs: Self, rhs: Self) -> Self {
        Formula::Until(interval, Box::new(lhs), Box::new(rhs))
    }

    /// Horizon length: `0` for predicates, `max(h1 + b - 1, h2 + b)` for
    /// `U[a,b)`; `F` and `G` are treated as `true U` and its dual, which
    /// reduces to `h + b`.
    pub fn horizon(&self) -> usize {
        match self {
            Formula::Predicate(_) => 0,
            Formula::Not(p) => p.horizon(),
            Formula::And(l, r) | Formula::Or(l, r) => l.horizon().max(r.horizon()),
            Formula::Finally(i, p) | Formula::Globally(i, p) => p.horizon() + i.end(),
            Formula::Until(i, l, r) => (l.horizon() + i.end() - 1).max(r.horizon() + i.end()),
        }
    }

    /// Number of samples needed to evaluate the formula at one time:
    /// `max(horizon, 1)`.
    pub fn window_len(&self) -> usize {
        self.horizon().max(1)
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Predicate(_) => 0,
            Formula::Not(p) | Formula::Finally(_, p) | Formula::Globally(_, p) => 1 + p.depth(),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(_, l, r) => {
                1 + l.depth().max(r.depth())
            }
        }
    }

    pub fn predicates(&self) -> Vec<&Predicate<T>> {
        let mut out = Vec::new();
        self.collect_predicates(&mut out);
        out
    }

    fn collect_predicates<'a>(&'a self, out: &mut Vec<&'a Predicate<T>>) {
        match self {
            Formula::Predicate(p) => out.push(p),
            Formula::Not(p) | Formula::Finally(_, p) | Formula::Globally(_, p) => {
                p.collect_predicates(out)
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Until(_, l, r) => {
                l.collect_predicates(out);
                r.collect_predicates(out);
            }
        }
    }

    /// Split `F[0,T) psi` or `G[0,T) psi`; anything else is rejected.
    pub fn top_level(&self) -> Result<TopLevel<T>, StlError> {
        let (outer, interval, inner) = match self {
            Formula::Finally(i, p) => (Outer::Finally, i, p),
            Formula::Globally(i, p) => (Outer::Globally, i, p),
            _ => return Err(StlError::NotTopLevel(self.to_string())),
        };
        if interval.start() != 0 {
            return Err(StlError::NotTopLevel(self.to_string()));
        }
        Ok(TopLevel {
            outer,
            bound: interval.end(),
            inner: (**inner).clone(),
        })
    }

    /// Print using explicit variable names (defaults are `x`, `y`, `z`, `x3`, ...).
    pub fn display_with<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        Named {
            formula: self,
            names,
        }
    }

    fn write_with(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        match self {
            Formula::Predicate(p) => p.write_with(f, names),
            Formula::Not(p) => {
                write!(f, "!")?;
                p.write_operand(f, names)
            }
            Formula::And(l, r) => {
                write!(f, "(")?;
                l.write_with(f, names)?;
                write!(f, " & ")?;
                r.write_with(f, names)?;
                write!(f, ")")
            }
            Formula::Or(l, r) => {
                write!(f, "(")?;
                l.write_with(f, names)?;
                write!(f, " | ")?;
                r.write_with(f, names)?;
                write!(f, ")")
            }
            Formula::Finally(i, p) => {
                write!(f, "F{i}")?;
                p.write_operand(f, names)
            }
            Formula::Globally(i, p) => {
                write!(f, "G{i}")?;
                p.write_operand(f, names)
            }
            Formula::Until(i, l, r) => {
                write!(f, "(")?;
                l.write_with(f, names)?;
                write!(f, " U{i} ")?;
                r.write_with(f, names)?;
                write!(f, ")")
            }
        }
    }

    // Operand of a prefix operator: binary forms carry their own parentheses.
    fn write_operand(&self, f: &mut fmt::Formatter<'_>, names: &[String]) -> fmt::Result {
        match self {
            Formula::Predicate(_) => {
                write!(f, "(")?;
                self.write_with(f, names)?;
                write!(f, ")")
            }
            _ => self.write_with(f, names),
        }
    }
}

struct Named<'a, T> {
    formula: &'a Formula<T>,
    names: &'a [String],
}

impl<T: Scalar> fmt::Display for Named<'_, T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.formula.write_with(f, self.names)
    }
}

impl<T: Scalar> fmt::Display for Formula<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_with(f, &[])
    }
}
