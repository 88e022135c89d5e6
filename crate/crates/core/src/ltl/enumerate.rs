//! Exhaustive generators for small formulas and traces, used to cross-check
//! the automaton against the direct semantics.

use super::formula::{Formula, PropId};

/// Every positive-normal-form co-safe formula of syntax depth at most `depth`
/// over the propositions `1..=props`. Leaves are `true`, `false`, atoms and
/// negated atoms (a negated atom counts as depth 1).
pub fn cosafe_formulas(depth: usize, props: u16) -> Vec<Formula> {
    let mut leaves = vec![Formula::True, Formula::False];
    for p in 1..=props {
        leaves.push(Formula::atom(p));
        leaves.push(Formula::not(Formula::atom(p)));
    }
    if depth == 0 {
        return Vec::new();
    }
    let mut all = leaves;
    for _ in 1..depth {
        let prev = all.clone();
        let mut next = prev.clone();
        for f in &prev {
            next.push(Formula::next(f.clone()));
            next.push(Formula::eventually(f.clone()));
        }
        for a in &prev {
            for b in &prev {
                next.push(Formula::and(a.clone(), b.clone()));
                next.push(Formula::or(a.clone(), b.clone()));
                next.push(Formula::until(a.clone(), b.clone()));
            }
        }
        // shallower formulas are rebuilt at every level
        next.sort();
        next.dedup();
        all = next;
    }
    all
}

/// Every trace of length `1..=max_len` over propositions `0..alphabet`. With
/// `collapsed`, consecutive repeats are excluded.
pub fn traces(max_len: usize, alphabet: u16, collapsed: bool) -> Vec<Vec<PropId>> {
    let mut out: Vec<Vec<PropId>> = Vec::new();
    let mut frontier: Vec<Vec<PropId>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut grown = Vec::new();
        for t in &frontier {
            for a in 0..alphabet {
                if collapsed && t.last() == Some(&PropId(a)) {
                    continue;
                }
                let mut n = t.clone();
                n.push(PropId(a));
                grown.push(n);
            }
        }
        out.extend(grown.iter().cloned());
        frontier = grown;
    }
    out
}
