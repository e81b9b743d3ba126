use crate::Scalar;

use super::{Formula, Signal, StlError};

fn check<T: Scalar>(s: &Signal<T>, phi: &Formula<T>, t: usize) -> Result<(), StlError> {
    for p in phi.predicates() {
        if p.dim() != s.dim() {
            return Err(StlError::SignalDimension {
                expected: p.dim(),
                found: s.dim(),
            });
        }
    }
    s.check_window(t, t + phi.window_len() - 1)
}

/// Boolean satisfaction `s[t] |= phi`. Requires samples `t ..= t + W - 1`
/// with `W = max(hrz(phi), 1)`.
pub fn satisfies<T: Scalar>(s: &Signal<T>, phi: &Formula<T>, t: usize) -> Result<bool, StlError> {
    check(s, phi, t)?;
    Ok(sat(s, phi, t))
}

/// Robustness degree `r(s, phi, t)`, same window requirement as [`satisfies`].
pub fn robustness<T: Scalar>(s: &Signal<T>, phi: &Formula<T>, t: usize) -> Result<T, StlError> {
    check(s, phi, t)?;
    Ok(rob(s, phi, t))
}

fn sat<T: Scalar>(s: &Signal<T>, phi: &Formula<T>, t: usize) -> bool {
    match phi {
        Formula::Predicate(p) => p.holds(s.at(t)),
        Formula::Not(p) => !sat(s, p, t),
        Formula::And(l, r) => sat(s, l, t) && sat(s, r, t),
        Formula::Or(l, r) => sat(s, l, t) || sat(s, r, t),
        Formula::Finally(i, p) => i.shifted(t).any(|u| sat(s, p, u)),
        Formula::Globally(i, p) => i.shifted(t).all(|u| sat(s, p, u)),
        Formula::Until(i, l, r) => i
            .shifted(t)
            .any(|u| sat(s, r, u) && (t..u).all(|v| sat(s, l, v))),
    }
}

fn rob<T: Scalar>(s: &Signal<T>, phi: &Formula<T>, t: usize) -> T {
    match phi {
        Formula::Predicate(p) => p.robustness(s.at(t)),
        Formula::Not(p) => -rob(s, p, t),
        Formula::And(l, r) => rob(s, l, t).min(rob(s, r, t)),
        Formula::Or(l, r) => rob(s, l, t).max(rob(s, r, t)),
        Formula::Finally(i, p) => i
            .shifted(t)
            .map(|u| rob(s, p, u))
            .fold(T::neg_infinity(), T::max),
        Formula::Globally(i, p) => i
            .shifted(t)
            .map(|u| rob(s, p, u))
            .fold(T::infinity(), T::min),
        Formula::Until(i, l, r) => {
            // running minimum of phi1 over [t, u)
            let mut prefix = T::infinity();
            let mut best = T::neg_infinity();
            for u in t..t + i.end() {
                if u >= t + i.start() {
                    best = best.max(rob(s, r, u).min(prefix));
                }
                if u + 1 < t + i.end() {
                    prefix = prefix.min(rob(s, l, u));
                }
            }
            best
        }
    }
}
