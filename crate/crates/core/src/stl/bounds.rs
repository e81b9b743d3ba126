use crate::Scalar;

use super::{Formula, StlError};

/// Closed interval `[lo, hi]` enclosing every robustness value a formula
/// can take over a family of signals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bounds<T> {
    pub lo: T,
    pub hi: T,
}

impl<T: Scalar> Bounds<T> {
    fn neg(self) -> Self {
        Bounds {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    fn min(self, o: Self) -> Self {
        Bounds {
            lo: self.lo.min(o.lo),
            hi: self.hi.min(o.hi),
        }
    }

    fn max(self, o: Self) -> Self {
        Bounds {
            lo: self.lo.max(o.lo),
            hi: self.hi.max(o.hi),
        }
    }

    fn top() -> Self {
        Bounds {
            lo: T::infinity(),
            hi: T::infinity(),
        }
    }

    fn bottom() -> Self {
        Bounds {
            lo: T::neg_infinity(),
            hi: T::neg_infinity(),
        }
    }
}

/// Interval evaluation of the robustness recursion at `t = 0` when sample
/// `k` is only known to lie in the box `[lower[k], upper[k]]`.
///
/// The result encloses `robustness(s, phi, 0)` for every signal `s` whose
/// samples lie in the boxes; it may be wider than the exact range when the
/// same sample feeds several sub-formulae.
pub fn robustness_bounds<T: Scalar>(
    lower: &[Vec<T>],
    upper: &[Vec<T>],
    phi: &Formula<T>,
) -> Result<Bounds<T>, StlError> {
    let need = phi.window_len();
    if lower.len() != upper.len() || lower.len() < need {
        return Err(StlError::WindowOutOfRange {
            from: 0,
            to: need - 1,
            first: 0,
            last: lower.len().min(upper.len()).saturating_sub(1),
        });
    }
    for p in phi.predicates() {
        if let Some(b) = lower.iter().chain(upper).find(|b| b.len() != p.dim()) {
            return Err(StlError::SignalDimension {
                expected: p.dim(),
                found: b.len(),
            });
        }
    }
    Ok(eval(lower, upper, phi, 0))
}

fn eval<T: Scalar>(lo: &[Vec<T>], hi: &[Vec<T>], phi: &Formula<T>, t: usize) -> Bounds<T> {
    match phi {
        Formula::Predicate(p) => {
            let (l, h) = p.robustness_bounds(&lo[t], &hi[t]);
            Bounds { lo: l, hi: h }
        }
        Formula::Not(p) => eval(lo, hi, p, t).neg(),
        Formula::And(a, b) => eval(lo, hi, a, t).min(eval(lo, hi, b, t)),
        Formula::Or(a, b) => eval(lo, hi, a, t).max(eval(lo, hi, b, t)),
        Formula::Finally(i, p) => i
            .shifted(t)
            .map(|u| eval(lo, hi, p, u))
            .fold(Bounds::bottom(), Bounds::max),
        Formula::Globally(i, p) => i
            .shifted(t)
            .map(|u| eval(lo, hi, p, u))
            .fold(Bounds::top(), Bounds::min),
        Formula::Until(i, a, b) => {
            let mut prefix = Bounds::top();
            let mut best = Bounds::bottom();
            for u in t..t + i.end() {
                if u >= t + i.start() {
                    best = best.max(eval(lo, hi, b, u).min(prefix));
                }
                if u + 1 < t + i.end() {
                    prefix = prefix.min(eval(lo, hi, a, u));
                }
            }
            best
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stl::{robustness, Interval, Predicate, Relation, Signal};

    #[test]
    fn degenerate_boxes_match_point_robustness() {
        let phi = Formula::finally(
            Interval::new(0, 3).unwrap(),
            Formula::pred(Predicate::axis(2, 0, Relation::Greater, 1.0))
                .and(Formula::pred(Predicate::axis(2, 1, Relation::Less, 2.0)).not()),
        );
        let pts = vec![vec![0.5, 3.0], vec![1.5, 2.5], vec![2.0, 1.0]];
        let b = robustness_bounds(&pts, &pts, &phi).unwrap();
        let r = robustness(&Signal::from_samples(pts).unwrap(), &phi, 0).unwrap();
        assert_eq!(b.lo, r);
        assert_eq!(b.hi, r);
    }

    #[test]
    fn box_encloses_samples() {
        let phi = Formula::pred(Predicate::axis(1, 0, Relation::Less, 2.5));
        let b = robustness_bounds(&[vec![2.0]], &[vec![3.0]], &phi).unwrap();
        assert_eq!((b.lo, b.hi), (-0.5, 0.5));
    }

    #[test]
    fn short_box_sequence_rejected() {
        let phi = Formula::globally(
            Interval::new(0, 2).unwrap(),
            Formula::pred(Predicate::axis(1, 0, Relation::Less, 2.5)),
        );
        assert!(robustness_bounds(&[vec![0.0]], &[vec![1.0]], &phi).is_err());
    }
}
