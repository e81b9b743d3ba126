//! Discrete-time STL: syntax, horizon length, Boolean and quantitative
//! semantics.
//!
//! Temporal intervals are half-open integer sample ranges `[a,b)`. The
//! robustness of `phi1 U[a,b) phi2` at `t` is the maximum over
//! `t' in [t+a, t+b)` of `min(r(phi2, t'), min_{t'' in [t, t')} r(phi1, t''))`,
//! the quantitative counterpart of the Boolean clause, so the sign of the
//! robustness always agrees with satisfaction when it is non-zero.

mod bounds;
mod formula;
mod parser;
mod semantics;
mod signal;

pub use bounds::{robustness_bounds, Bounds};
pub use formula::{Formula, Interval, Outer, Predicate, Relation, TopLevel};
pub use parser::{parse, ParseContext};
pub use semantics::{robustness, satisfies};
pub use signal::Signal;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StlError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("variable `{name}` refers to component {index} but the signal has dimension {dim}")]
    DimensionMismatch {
        name: String,
        index: usize,
        dim: usize,
    },
    #[error("predicate has {found} coefficients, expected {expected}")]
    PredicateDimension { expected: usize, found: usize },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("empty interval [{start},{end})")]
    EmptyInterval { start: usize, end: usize },
    #[error("evaluation window [{from}, {to}] lies outside the signal samples [{first}, {last}]")]
    WindowOutOfRange {
        from: usize,
        to: usize,
        first: usize,
        last: usize,
    },
    #[error("signal dimension {found} does not match formula dimension {expected}")]
    SignalDimension { expected: usize, found: usize },
    #[error("not a top-level specification of the form F[0,T)(psi) or G[0,T)(psi): {0}")]
    NotTopLevel(String),
    #[error("malformed signal: {0}")]
    Signal(String),
}

/// Default name of signal component `i`: `x`, `y`, `z`, then `x3`, `x4`, ...
pub fn default_var_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        _ => format!("x{i}"),
    }
}

/// Inverse of [`default_var_name`].
pub fn default_var_index(name: &str) -> Option<usize> {
    match name {
        "x" => Some(0),
        "y" => Some(1),
        "z" => Some(2),
        _ => {
            let digits = name.strip_prefix('x')?;
            let i: usize = digits.parse().ok()?;
            (i >= 3 && digits == i.to_string()).then_some(i)
        }
    }
}
