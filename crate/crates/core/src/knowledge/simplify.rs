use super::{feasibility, KnowledgeError, NonvalidSet};
use crate::decomposition::Decomposition;
use crate::geometry::Vec2;
use crate::ltl::{Formula, ListId, ListOp, ListView, PropTable};

/// Removes list `l` from the formula, climbing towards the root until a list
/// attached by a disjunction is found. `None` when the root is reached first.
pub fn simplify(view: &ListView, l: ListId) -> Option<Formula> {
    let node = view.node(l);
    if node.op.contains(&ListOp::Or) {
        return view.remove_disjunct(l);
    }
    let parent = node.parent?;
    if parent == view.root() {
        return None;
    }
    simplify(view, parent)
}

/// Drops every occurrence of a nonvalid proposition from `phi`.
///
/// Negated nonvalid atoms are first replaced by `true`. Remaining positive
/// occurrences are then removed one at a time, leftmost first.
/// `None` means the task cannot be satisfied.
pub fn evaluate_with(phi: &Formula, nonvalid: &NonvalidSet) -> Option<Formula> {
    if nonvalid.is_empty() {
        return Some(phi.clone());
    }
    let mut f = prune_negated(phi, nonvalid);
    for p in nonvalid.props() {
        while f.mentions(p) {
            let view = ListView::build(&f);
            let first = view.atom_lists(p)[0];
            f = simplify(&view, first)?;
        }
    }
    Some(f)
}

/// Computes the nonvalid propositions for a start position and simplifies
/// `phi` accordingly.
pub fn evaluate(
    phi: &Formula,
    props: &PropTable,
    d: &Decomposition,
    start: Vec2,
) -> Result<(NonvalidSet, Option<Formula>), KnowledgeError> {
    let m = feasibility(props, d, start)?;
    let psi = evaluate_with(phi, &m);
    Ok((m, psi))
}

/// Replaces negated nonvalid atoms by `true` and folds the resulting
/// constants. Formulas without such atoms are returned unchanged.
pub fn prune_negated(phi: &Formula, nonvalid: &NonvalidSet) -> Formula {
    if has_negated(phi, nonvalid) {
        drop_negated(phi, nonvalid)
    } else {
        phi.clone()
    }
}

fn has_negated(f: &Formula, nonvalid: &NonvalidSet) -> bool {
    match f {
        Formula::Not(inner) => matches!(inner.as_ref(), Formula::Atom(p) if nonvalid.contains(*p)),
        _ => f.children().into_iter().any(|c| has_negated(c, nonvalid)),
    }
}

fn drop_negated(f: &Formula, nonvalid: &NonvalidSet) -> Formula {
    use Formula as F;
    let rec = |g: &Formula| drop_negated(g, nonvalid);
    match f {
        F::Not(inner) => match inner.as_ref() {
            F::Atom(p) if nonvalid.contains(*p) => F::True,
            _ => F::not(rec(inner)),
        },
        F::And(a, b) => match (rec(a), rec(b)) {
            (F::True, x) | (x, F::True) => x,
            (F::False, _) | (_, F::False) => F::False,
            (x, y) => F::and(x, y),
        },
        F::Or(a, b) => match (rec(a), rec(b)) {
            (F::True, _) | (_, F::True) => F::True,
            (F::False, x) | (x, F::False) => x,
            (x, y) => F::or(x, y),
        },
        F::Eventually(a) => match rec(a) {
            F::True => F::True,
            x => F::eventually(x),
        },
        F::Until(a, b) => match (rec(a), rec(b)) {
            (_, F::True) => F::True,
            (x, y) => F::until(x, y),
        },
        F::Next(a) => F::next(rec(a)),
        F::True | F::False | F::Atom(_) => f.clone(),
    }
}
