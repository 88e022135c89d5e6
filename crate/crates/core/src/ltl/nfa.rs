//! Finite-trace automaton for co-safe formulas.
//!
//! States are conjunctions ("cubes") of pending obligations. Reading a symbol
//! progresses every obligation through that symbol; the progressed formula is
//! split into disjunctive normal form and each disjunct becomes a successor,
//! which is where the nondeterminism comes from. When every obligation of a
//! cube is already discharged by the symbol, the run moves to a single
//! absorbing accept state. Absorption is sound because satisfaction of a
//! co-safe formula is preserved by extending the trace.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::formula::{Formula, PropId};
use super::pnf::{to_pnf, NotCoSafe};

pub const DEFAULT_STATE_CAP: usize = 10_000;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum NfaError {
    #[error(transparent)]
    NotCoSafe(#[from] NotCoSafe),
    #[error("automaton exceeds the cap of {cap} states; the formula is too large")]
    StateCap { cap: usize },
    #[error("proposition id {0} is outside the automaton alphabet")]
    UnknownProposition(u16),
}

type Cube = BTreeSet<Formula>;

/// Sorted, duplicate-free set of automaton states.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StateSet(Vec<u32>);

impl StateSet {
    pub fn from_states<I: IntoIterator<Item = u32>>(it: I) -> Self {
        let mut v: Vec<u32> = it.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        StateSet(v)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, s: u32) -> bool {
        self.0.binary_search(&s).is_ok()
    }

    pub fn intersects(&self, other: &StateSet) -> bool {
        self.0.iter().any(|s| other.contains(*s))
    }

    pub fn iter(&self) -> impl Iterator<Item = u32> + '_ {
        self.0.iter().copied()
    }
}

#[derive(Debug, Clone)]
pub struct Nfa {
    alphabet: usize,
    /// `None` marks the absorbing accept state.
    states: Vec<Option<Cube>>,
    /// `trans[state][symbol]` is the sorted successor list.
    trans: Vec<Vec<Vec<u32>>>,
    initial: StateSet,
    accepting: StateSet,
}

const ACCEPT: u32 = 0;

impl Nfa {
    /// Builds the automaton over an alphabet of `alphabet` propositions
    /// (ids `0..alphabet`), with the default state cap.
    pub fn build(f: &Formula, alphabet: usize) -> Result<Nfa, NfaError> {
        Self::build_capped(f, alphabet, DEFAULT_STATE_CAP)
    }

    pub fn build_capped(f: &Formula, alphabet: usize, cap: usize) -> Result<Nfa, NfaError> {
        let f = to_pnf(f)?;
        if let Some(p) = f.props().into_iter().find(|p| p.index() >= alphabet) {
            return Err(NfaError::UnknownProposition(p.0));
        }
        let mut b = Builder {
            alphabet,
            cap,
            index: HashMap::new(),
            states: vec![None],
            trans: vec![vec![vec![ACCEPT]; alphabet]],
            work: Vec::new(),
        };
        let mut initial = Vec::new();
        for cube in dnf(&f) {
            initial.push(b.intern(cube)?);
        }
        while let Some(id) = b.work.pop() {
            let cube = b.states[id as usize]
                .clone()
                .expect("accept state is never queued");
            let mut row = Vec::with_capacity(alphabet);
            for a in 0..alphabet {
                let a = PropId(a as u16);
                let mut succ = Vec::new();
                if cube.iter().all(|m| discharged(m, a)) {
                    succ.push(ACCEPT);
                } else {
                    let rest = cube
                        .iter()
                        .fold(Formula::True, |acc, m| mk_and(acc, progress(m, a)));
                    for c in dnf(&rest) {
                        succ.push(b.intern(c)?);
                    }
                    succ.sort_unstable();
                    succ.dedup();
                }
                row.push(succ);
            }
            b.trans[id as usize] = row;
        }
        Ok(Nfa {
            alphabet,
            states: b.states,
            trans: b.trans,
            initial: StateSet::from_states(initial),
            accepting: StateSet::from_states([ACCEPT]),
        })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn accepting(&self) -> &StateSet {
        &self.accepting
    }

    pub fn is_accepting(&self, set: &StateSet) -> bool {
        set.intersects(&self.accepting)
    }

    pub fn successors(&self, state: u32, p: PropId) -> &[u32] {
        &self.trans[state as usize][p.index()]
    }

    /// Image of `states` under symbol `p`.
    pub fn step(&self, states: &StateSet, p: PropId) -> Result<StateSet, NfaError> {
        if p.index() >= self.alphabet {
            return Err(NfaError::UnknownProposition(p.0));
        }
        Ok(StateSet::from_states(states.iter().flat_map(|s| {
            self.trans[s as usize][p.index()].iter().copied()
        })))
    }

    /// Runs the trace from the initial states; empty traces are rejected.
    pub fn accepts(&self, trace: &[PropId]) -> Result<bool, NfaError> {
        if let Some(bad) = trace.iter().find(|p| p.index() >= self.alphabet) {
            return Err(NfaError::UnknownProposition(bad.0));
        }
        if trace.is_empty() {
            return Ok(false);
        }
        let mut cur = self.initial.0.clone();
        let mut next = Vec::with_capacity(cur.len());
        for &p in trace {
            // the accept state is absorbing
            if cur.first() == Some(&ACCEPT) {
                return Ok(true);
            }
            next.clear();
            for &s in &cur {
                next.extend_from_slice(&self.trans[s as usize][p.index()]);
            }
            if next.is_empty() {
                return Ok(false);
            }
            next.sort_unstable();
            next.dedup();
            std::mem::swap(&mut cur, &mut next);
        }
        Ok(cur.iter().any(|&s| self.accepting.contains(s)))
    }

    /// Obligations of a state, or `None` for the accept state.
    pub fn obligations(&self, state: u32) -> Option<Vec<&Formula>> {
        self.states[state as usize]
            .as_ref()
            .map(|c| c.iter().collect())
    }
}

struct Builder {
    alphabet: usize,
    cap: usize,
    index: HashMap<Cube, u32>,
    states: Vec<Option<Cube>>,
    trans: Vec<Vec<Vec<u32>>>,
    work: Vec<u32>,
}

impl Builder {
    fn intern(&mut self, cube: Cube) -> Result<u32, NfaError> {
        if let Some(&id) = self.index.get(&cube) {
            return Ok(id);
        }
        if self.states.len() >= self.cap {
            return Err(NfaError::StateCap { cap: self.cap });
        }
        let id = self.states.len() as u32;
        self.index.insert(cube.clone(), id);
        self.states.push(Some(cube));
        self.trans.push(vec![Vec::new(); self.alphabet]);
        self.work.push(id);
        Ok(id)
    }
}

/// Whether the one-symbol trace `a` already satisfies `f`.
fn discharged(f: &Formula, a: PropId) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(p) => *p == a,
        Formula::Not(g) => !discharged(g, a),
        Formula::And(x, y) => discharged(x, a) && discharged(y, a),
        Formula::Or(x, y) => discharged(x, a) || discharged(y, a),
        Formula::Next(_) => false,
        Formula::Until(_, y) | Formula::Eventually(y) => discharged(y, a),
    }
}

/// What a nonempty remainder must satisfy after reading `a`.
fn progress(f: &Formula, a: PropId) -> Formula {
    match f {
        Formula::True => Formula::True,
        Formula::False => Formula::False,
        Formula::Atom(p) => bool_f(*p == a),
        Formula::Not(g) => bool_f(!discharged(g, a)),
        Formula::And(x, y) => mk_and(progress(x, a), progress(y, a)),
        Formula::Or(x, y) => mk_or(progress(x, a), progress(y, a)),
        Formula::Next(g) => (**g).clone(),
        Formula::Until(x, y) => mk_or(progress(y, a), mk_and(progress(x, a), f.clone())),
        Formula::Eventually(y) => mk_or(progress(y, a), f.clone()),
    }
}

fn bool_f(b: bool) -> Formula {
    if b {
        Formula::True
    } else {
        Formula::False
    }
}

fn mk_and(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::False, _) | (_, Formula::False) => Formula::False,
        (Formula::True, x) | (x, Formula::True) => x,
        (x, y) if x == y => x,
        (x, y) => Formula::and(x, y),
    }
}

fn mk_or(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::True, _) | (_, Formula::True) => Formula::True,
        (Formula::False, x) | (x, Formula::False) => x,
        (x, y) if x == y => x,
        (x, y) => Formula::or(x, y),
    }
}

/// Disjunctive normal form over temporal obligations and literals, with
/// contradictory cubes dropped and subsumed cubes removed.
fn dnf(f: &Formula) -> Vec<Cube> {
    let raw: Vec<Cube> = match f {
        Formula::True => vec![Cube::new()],
        Formula::False => vec![],
        Formula::Or(a, b) => {
            let mut v = dnf(a);
            v.extend(dnf(b));
            v
        }
        Formula::And(a, b) => {
            let left = dnf(a);
            let right = dnf(b);
            let mut v = Vec::with_capacity(left.len() * right.len());
            for x in &left {
                for y in &right {
                    let mut c = x.clone();
                    c.extend(y.iter().cloned());
                    if consistent(&c) {
                        v.push(c);
                    }
                }
            }
            v
        }
        other => vec![Cube::from([other.clone()])],
    };
    minimize(raw)
}

/// A cube is inconsistent when it asserts two different current regions or a
/// region together with its negation.
fn consistent(c: &Cube) -> bool {
    let mut pos: Option<PropId> = None;
    for m in c {
        if let Formula::Atom(p) = m {
            if pos.is_some_and(|q| q != *p) {
                return false;
            }
            pos = Some(*p);
        }
    }
    match pos {
        Some(p) => !c.contains(&Formula::not(Formula::Atom(p))),
        None => true,
    }
}

fn minimize(mut cubes: Vec<Cube>) -> Vec<Cube> {
    cubes.sort_by_key(|c| c.len());
    cubes.dedup();
    let mut out: Vec<Cube> = Vec::with_capacity(cubes.len());
    for c in cubes {
        if !out.iter().any(|k| k.is_subset(&c)) {
            out.push(c);
        }
    }
    out
}
