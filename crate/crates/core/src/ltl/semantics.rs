use std::ops::Deref;

use thiserror::Error;

use super::formula::{Formula, PropId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TraceError {
    #[error("a discrete trace must contain at least one proposition")]
    Empty,
}

/// Finite sequence of traversed regions with consecutive repeats collapsed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DiscreteTrace(Vec<PropId>);

impl DiscreteTrace {
    pub fn new<I: IntoIterator<Item = PropId>>(props: I) -> Result<Self, TraceError> {
        let mut v: Vec<PropId> = Vec::new();
        for p in props {
            if v.last() != Some(&p) {
                v.push(p);
            }
        }
        if v.is_empty() {
            return Err(TraceError::Empty);
        }
        Ok(DiscreteTrace(v))
    }

    /// Appends `p` unless it repeats the last element.
    pub fn push(&mut self, p: PropId) {
        if self.0.last() != Some(&p) {
            self.0.push(p);
        }
    }

    pub fn first(&self) -> PropId {
        self.0[0]
    }

    pub fn into_inner(self) -> Vec<PropId> {
        self.0
    }
}

impl Deref for DiscreteTrace {
    type Target = [PropId];
    fn deref(&self) -> &[PropId] {
        &self.0
    }
}

/// Finite-trace semantics, evaluated directly on the formula.
///
/// Position semantics: an atom holds iff it is the head; `X f` needs a
/// nonempty tail satisfying `f`; `a U b` needs some suffix satisfying `b` with
/// every earlier suffix satisfying `a`; `F f` is `true U f`. Negation is plain
/// complement, so formulas outside positive normal form are accepted too.
/// An empty trace satisfies nothing.
pub fn trace_satisfies(f: &Formula, trace: &[PropId]) -> bool {
    !trace.is_empty() && holds(f, trace, 0)
}

fn holds(f: &Formula, t: &[PropId], i: usize) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p) => t[i] == *p,
        Formula::Not(a) => !holds(a, t, i),
        Formula::And(a, b) => holds(a, t, i) && holds(b, t, i),
        Formula::Or(a, b) => holds(a, t, i) || holds(b, t, i),
        Formula::Next(a) => i + 1 < t.len() && holds(a, t, i + 1),
        Formula::Eventually(a) => (i..t.len()).any(|k| holds(a, t, k)),
        Formula::Until(a, b) => {
            for k in i..t.len() {
                if holds(b, t, k) {
                    return true;
                }
                if !holds(a, t, k) {
                    return false;
                }
            }
            false
        }
    }
}
