//! Syntactically co-safe LTL over region propositions.
//!
//! Formulas are interpreted over finite, nonempty traces of propositions where
//! exactly one proposition holds per position (regions are disjoint), so the
//! automaton alphabet is the proposition table itself rather than its powerset.

pub mod enumerate;
mod formula;
mod list_view;
mod nfa;
mod parse;
mod pnf;
mod semantics;

pub use formula::{Formula, PropId, PropTable, PropTableError};
pub use list_view::{ListId, ListNode, ListOp, ListView};
pub use nfa::{Nfa, NfaError, StateSet, DEFAULT_STATE_CAP};
pub use parse::{parse_formula, ParseError};
pub use pnf::{check_cosafe, to_pnf, NotCoSafe};
pub use semantics::{trace_satisfies, DiscreteTrace, TraceError};
