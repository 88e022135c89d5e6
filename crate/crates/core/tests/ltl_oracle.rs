//! Automaton and normal-form checks against the direct trace semantics.

use cosafe_core::ltl::enumerate::{cosafe_formulas, traces};
use cosafe_core::ltl::{to_pnf, trace_satisfies, Formula, Nfa, PropId};
use proptest::prelude::*;

#[test]
fn nfa_agrees_with_semantics_depth3_two_props_all_traces() {
    let formulas = cosafe_formulas(3, 2);
    let ts = traces(5, 3, false);
    for f in &formulas {
        let nfa = Nfa::build(f, 3).unwrap();
        for t in &ts {
            assert_eq!(
                nfa.accepts(t).unwrap(),
                trace_satisfies(f, t),
                "formula {f} trace {t:?}"
            );
        }
    }
}

fn arb_formula(props: u16) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        (1..=props).prop_map(Formula::atom),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::eventually),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::until(a, b)),
        ]
    })
}

fn arb_trace(props: u16) -> impl Strategy<Value = Vec<PropId>> {
    prop::collection::vec((0..=props).prop_map(PropId), 1..=8)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 2000, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn pnf_preserves_semantics(f in arb_formula(4), t in arb_trace(4)) {
        if let Ok(p) = to_pnf(&f) {
            prop_assert!(p.is_pnf());
            prop_assert_eq!(trace_satisfies(&f, &t), trace_satisfies(&p, &t));
        }
    }

    #[test]
    fn acceptance_is_closed_under_extension(
        f in arb_formula(3),
        t in arb_trace(3),
        ext in prop::collection::vec((0..=3u16).prop_map(PropId), 1..4),
    ) {
        if let Ok(nfa) = Nfa::build(&f, 4) {
            if nfa.accepts(&t).unwrap() {
                let mut longer = t.clone();
                longer.extend(ext);
                prop_assert!(nfa.accepts(&longer).unwrap());
            }
        }
    }

    #[test]
    fn nfa_matches_semantics_on_random_formulas(f in arb_formula(4), t in arb_trace(4)) {
        if let Ok(nfa) = Nfa::build(&f, 5) {
            prop_assert_eq!(nfa.accepts(&t).unwrap(), trace_satisfies(&f, &t));
        }
    }
}
