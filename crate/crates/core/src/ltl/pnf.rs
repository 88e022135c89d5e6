use thiserror::Error;

use super::formula::Formula;

/// Pushing a negation through this operator would need an operator outside
/// the co-safe fragment (always, release or weak next).
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("formula is not syntactically co-safe: negated {operator} has no co-safe dual")]
pub struct NotCoSafe {
    pub operator: &'static str,
}

/// Rewrites `f` into positive normal form, with negation only on atoms.
pub fn to_pnf(f: &Formula) -> Result<Formula, NotCoSafe> {
    pos(f)
}

/// True iff `f` has a positive normal form inside the co-safe fragment.
pub fn check_cosafe(f: &Formula) -> bool {
    to_pnf(f).is_ok()
}

fn pos(f: &Formula) -> Result<Formula, NotCoSafe> {
    Ok(match f {
        Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
        Formula::Not(a) => neg(a)?,
        Formula::And(a, b) => Formula::and(pos(a)?, pos(b)?),
        Formula::Or(a, b) => Formula::or(pos(a)?, pos(b)?),
        Formula::Next(a) => Formula::next(pos(a)?),
        Formula::Until(a, b) => Formula::until(pos(a)?, pos(b)?),
        Formula::Eventually(a) => Formula::eventually(pos(a)?),
    })
}

fn neg(f: &Formula) -> Result<Formula, NotCoSafe> {
    Ok(match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Atom(_) => Formula::not(f.clone()),
        Formula::Not(a) => pos(a)?,
        Formula::And(a, b) => Formula::or(neg(a)?, neg(b)?),
        Formula::Or(a, b) => Formula::and(neg(a)?, neg(b)?),
        Formula::Next(_) => return Err(NotCoSafe { operator: "next" }),
        Formula::Until(..) => return Err(NotCoSafe { operator: "until" }),
        Formula::Eventually(_) => {
            return Err(NotCoSafe {
                operator: "eventually",
            })
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::Formula as F;

    #[test]
    fn de_morgan_on_disjunction() {
        let f = F::not(F::or(F::atom(1), F::atom(2)));
        assert_eq!(
            to_pnf(&f).unwrap(),
            F::and(F::not(F::atom(1)), F::not(F::atom(2)))
        );
    }

    #[test]
    fn negated_atom_is_already_pnf() {
        let f = F::not(F::atom(1));
        assert_eq!(to_pnf(&f).unwrap(), f);
    }

    #[test]
    fn negated_eventually_is_rejected() {
        let f = F::not(F::eventually(F::atom(1)));
        assert_eq!(
            to_pnf(&f),
            Err(NotCoSafe {
                operator: "eventually"
            })
        );
        assert!(!check_cosafe(&f));
    }

    #[test]
    fn cosafe_examples() {
        assert!(check_cosafe(&F::eventually(F::atom(1))));
        // visit p1, p3, p2, p4 in order
        let b = F::eventually(F::and(
            F::atom(1),
            F::eventually(F::and(
                F::atom(3),
                F::eventually(F::and(F::atom(2), F::eventually(F::atom(4)))),
            )),
        ));
        assert!(check_cosafe(&b));
        assert!(!check_cosafe(&F::not(F::next(F::atom(1)))));
        assert!(!check_cosafe(&F::not(F::until(F::atom(1), F::atom(2)))));
    }

    #[test]
    fn double_negation_and_constants() {
        let f = F::not(F::not(F::eventually(F::atom(1))));
        assert_eq!(to_pnf(&f).unwrap(), F::eventually(F::atom(1)));
        assert_eq!(to_pnf(&F::not(F::True)).unwrap(), F::False);
        let g = F::not(F::and(F::atom(1), F::not(F::atom(2))));
        let p = to_pnf(&g).unwrap();
        assert!(p.is_pnf());
        assert_eq!(p, F::or(F::not(F::atom(1)), F::atom(2)));
    }
}
