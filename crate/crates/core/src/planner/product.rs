use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use rand::Rng;

use super::guidance::GuidancePolicy;
use super::tree::NodeId;
use crate::decomposition::{CellId, Decomposition};
use crate::ltl::{Nfa, PropId, StateSet};

/// Index of an interned automaton state set.
pub type SetId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductKey {
    pub cell: CellId,
    pub set: SetId,
}

/// Bookkeeping for a product state that the tree has reached.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProductState {
    pub nsel: u32,
    pub nodes: Vec<NodeId>,
}

/// Discrete path through the product graph, ending in an accepting state.
/// Empty when no accepting state is reachable.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Lead(pub Vec<ProductKey>);

impl Lead {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

/// Product of the cell adjacency graph and the automaton, built lazily.
pub struct ProductGraph<'a> {
    nfa: &'a Nfa,
    d: &'a Decomposition,
    sets: Vec<StateSet>,
    set_index: HashMap<StateSet, SetId>,
    set_accepting: Vec<bool>,
    steps: HashMap<(SetId, PropId), SetId>,
    states: HashMap<ProductKey, ProductState>,
}

impl<'a> ProductGraph<'a> {
    pub fn new(nfa: &'a Nfa, d: &'a Decomposition) -> Self {
        let mut g = ProductGraph {
            nfa,
            d,
            sets: Vec::new(),
            set_index: HashMap::new(),
            set_accepting: Vec::new(),
            steps: HashMap::new(),
            states: HashMap::new(),
        };
        g.intern(nfa.initial().clone());
        g
    }

    pub fn decomposition(&self) -> &'a Decomposition {
        self.d
    }

    pub fn intern(&mut self, s: StateSet) -> SetId {
        if let Some(&id) = self.set_index.get(&s) {
            return id;
        }
        let id = self.sets.len() as SetId;
        self.set_accepting.push(self.nfa.is_accepting(&s));
        self.set_index.insert(s.clone(), id);
        self.sets.push(s);
        id
    }

    pub fn set(&self, id: SetId) -> &StateSet {
        &self.sets[id as usize]
    }

    /// The set before any symbol has been read.
    pub fn initial(&self) -> SetId {
        0
    }

    pub fn is_accepting(&self, id: SetId) -> bool {
        self.set_accepting[id as usize]
    }

    pub fn is_dead(&self, id: SetId) -> bool {
        self.sets[id as usize].is_empty()
    }

    pub fn step(&mut self, id: SetId, p: PropId) -> SetId {
        if let Some(&s) = self.steps.get(&(id, p)) {
            return s;
        }
        let next = self
            .nfa
            .step(&self.sets[id as usize], p)
            .expect("cell labels come from the automaton alphabet");
        let s = self.intern(next);
        self.steps.insert((id, p), s);
        s
    }

    /// Product state after the robot moves from `from` into `cell`. The
    /// automaton only advances when the region label changes.
    pub fn advance(&mut self, from: ProductKey, cell: CellId) -> ProductKey {
        let before = self.d.cell(from.cell).label;
        let after = self.d.cell(cell).label;
        let set = if before == after {
            from.set
        } else {
            self.step(from.set, after)
        };
        ProductKey { cell, set }
    }

    pub fn state(&self, key: &ProductKey) -> Option<&ProductState> {
        self.states.get(key)
    }

    pub fn add_node(&mut self, key: ProductKey, node: NodeId) {
        self.states.entry(key).or_default().nodes.push(node);
    }

    pub fn nsel(&self, key: &ProductKey) -> u32 {
        self.states.get(key).map_or(0, |s| s.nsel)
    }

    /// Product states that hold at least one tree node.
    pub fn frontier(&self) -> impl Iterator<Item = (&ProductKey, &ProductState)> {
        self.states.iter().filter(|(_, s)| !s.nodes.is_empty())
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Picks a lead state holding tree nodes with probability proportional to
    /// the policy's selection weight, and counts the selection.
    pub fn select_high_level_state<R: Rng + ?Sized>(
        &mut self,
        lead: &Lead,
        policy: &dyn GuidancePolicy,
        rng: &mut R,
    ) -> Option<ProductKey> {
        let mut seen = std::collections::HashSet::new();
        let candidates: Vec<(ProductKey, f64)> = lead
            .0
            .iter()
            .filter(|k| seen.insert(**k))
            .filter_map(|k| {
                let s = self.states.get(k)?;
                (!s.nodes.is_empty()).then(|| (*k, policy.selection_weight(s.nsel)))
            })
            .collect();
        let key = weighted_pick(&candidates, rng)?;
        self.states.get_mut(&key).expect("candidate exists").nsel += 1;
        Some(key)
    }

    /// Any state holding tree nodes, uniformly; used when there is no lead.
    pub fn select_any<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Option<ProductKey> {
        let mut keys: Vec<ProductKey> = self.frontier().map(|(k, _)| *k).collect();
        if keys.is_empty() {
            return None;
        }
        keys.sort_unstable();
        let key = keys[rng.random_range(0..keys.len())];
        self.states
            .get_mut(&key)
            .expect("frontier state exists")
            .nsel += 1;
        Some(key)
    }
}

fn weighted_pick<R: Rng + ?Sized>(items: &[(ProductKey, f64)], rng: &mut R) -> Option<ProductKey> {
    let total: f64 = items.iter().map(|(_, w)| w).sum();
    if items.is_empty() || !(total > 0.0) {
        return None;
    }
    let mut x = rng.random::<f64>() * total;
    for (k, w) in items {
        if x < *w {
            return Some(*k);
        }
        x -= w;
    }
    items.last().map(|(k, _)| *k)
}

#[derive(PartialEq)]
struct Entry(f64, ProductKey);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Cheapest path from any of the `sources` (with their starting costs) to a
/// product state whose automaton set is accepting. Dead product states are
/// never entered.
pub fn discrete_planning(
    g: &mut ProductGraph<'_>,
    sources: &[(ProductKey, f64)],
    policy: &dyn GuidancePolicy,
) -> Lead {
    let d = g.d;
    let mut dist: HashMap<ProductKey, f64> = HashMap::new();
    let mut prev: HashMap<ProductKey, ProductKey> = HashMap::new();
    let mut heap = BinaryHeap::new();
    for &(k, c) in sources {
        if g.is_dead(k.set) {
            continue;
        }
        if dist.get(&k).is_none_or(|&old| c < old) {
            dist.insert(k, c);
            heap.push(Entry(c, k));
        }
    }
    while let Some(Entry(c, k)) = heap.pop() {
        if dist.get(&k).is_some_and(|&best| c > best) {
            continue;
        }
        if g.is_accepting(k.set) {
            let mut path = vec![k];
            let mut cur = k;
            while let Some(&p) = prev.get(&cur) {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Lead(path);
        }
        let here = d.cell(k.cell).center();
        for &n in d.neighbors(k.cell) {
            let next = g.advance(k, n);
            if g.is_dead(next.set) {
                continue;
            }
            let w = policy.edge_weight((d.cell(n).center() - here).norm(), g.nsel(&next));
            let nc = c + w;
            if dist.get(&next).is_none_or(|&old| nc < old) {
                dist.insert(next, nc);
                prev.insert(next, k);
                heap.push(Entry(nc, next));
            }
        }
    }
    Lead::default()
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::decomposition::{decompose, Workspace};
    use crate::geometry::{Rect, Vec2};
    use crate::ltl::{parse_formula, PropTable};
    use crate::planner::InverseSquareGuidance;

    /// A 4x1 corridor of unit cells with p1 in the last cell and p2, walled
    /// off, above it.
    fn corridor() -> (PropTable, Decomposition) {
        let props = PropTable::with_names(["p1", "p2"]).unwrap();
        let w = Workspace {
            bounds: Rect::new(0.0, 0.0, 4.0, 3.0),
            regions: vec![
                (PropId(1), Rect::new(3.0, 0.0, 4.0, 1.0)),
                (PropId(2), Rect::new(0.0, 2.0, 1.0, 3.0)),
            ],
            fixed: vec![Rect::new(0.0, 1.0, 4.0, 2.0)],
        };
        (props, decompose(&w, 1.0).unwrap())
    }

    fn nfa(props: &PropTable, text: &str) -> Nfa {
        Nfa::build(&parse_formula(text, props).unwrap(), props.len()).unwrap()
    }

    fn key_at(g: &mut ProductGraph<'_>, x: f64, y: f64) -> ProductKey {
        let (cell, label) = g.d.locate(Vec2::new(x, y)).unwrap();
        let set = g.step(g.initial(), label);
        ProductKey { cell, set }
    }

    #[test]
    fn adjacent_goal_gives_lead_of_two() {
        let (props, d) = corridor();
        let a = nfa(&props, "F p1");
        let mut g = ProductGraph::new(&a, &d);
        let start = key_at(&mut g, 2.5, 0.5);
        let lead = discrete_planning(&mut g, &[(start, 0.0)], &InverseSquareGuidance::default());
        assert_eq!(lead.len(), 2);
        assert_eq!(lead.0[0], start);
        assert_eq!(d.cell(lead.0[1].cell).label, PropId(1));
        assert!(g.is_accepting(lead.0[1].set));
    }

    #[test]
    fn lead_steps_are_adjacent_and_end_accepting() {
        let (props, d) = corridor();
        let a = nfa(&props, "F p1");
        let mut g = ProductGraph::new(&a, &d);
        let start = key_at(&mut g, 0.5, 0.5);
        let lead = discrete_planning(&mut g, &[(start, 0.0)], &InverseSquareGuidance::default());
        assert_eq!(lead.len(), 4);
        for w in lead.0.windows(2) {
            assert!(d.neighbors(w[0].cell).contains(&w[1].cell));
        }
        assert!(g.is_accepting(lead.0.last().unwrap().set));
    }

    #[test]
    fn unreachable_goal_gives_empty_lead() {
        let (props, d) = corridor();
        let a = nfa(&props, "F p2");
        let mut g = ProductGraph::new(&a, &d);
        let start = key_at(&mut g, 0.5, 0.5);
        let lead = discrete_planning(&mut g, &[(start, 0.0)], &InverseSquareGuidance::default());
        assert!(lead.is_empty());
    }

    #[test]
    fn advance_only_steps_on_label_change() {
        let (props, d) = corridor();
        let a = nfa(&props, "F p1");
        let mut g = ProductGraph::new(&a, &d);
        let k0 = key_at(&mut g, 1.5, 0.5);
        let (c1, _) = d.locate(Vec2::new(2.5, 0.5)).unwrap();
        let k1 = g.advance(k0, c1);
        assert_eq!(
            k1,
            ProductKey {
                cell: c1,
                set: k0.set
            }
        );
        let (c2, _) = d.locate(Vec2::new(3.5, 0.5)).unwrap();
        let k2 = g.advance(k1, c2);
        assert!(g.is_accepting(k2.set));
    }

    #[test]
    fn forbidden_region_kills_the_set() {
        let (props, d) = corridor();
        let a = nfa(&props, "!p1 U p2");
        let mut g = ProductGraph::new(&a, &d);
        let k0 = key_at(&mut g, 2.5, 0.5);
        assert!(!g.is_dead(k0.set));
        let (c, _) = d.locate(Vec2::new(3.5, 0.5)).unwrap();
        let k = g.advance(k0, c);
        assert!(g.is_dead(k.set));
        let lead = discrete_planning(&mut g, &[(k, 0.0)], &InverseSquareGuidance::default());
        assert!(lead.is_empty());
    }

    fn two_state_graph<'a>(
        a: &'a Nfa,
        d: &'a Decomposition,
    ) -> (ProductGraph<'a>, ProductKey, ProductKey) {
        let mut g = ProductGraph::new(a, d);
        let k0 = key_at(&mut g, 0.5, 0.5);
        let k1 = key_at(&mut g, 1.5, 0.5);
        (g, k0, k1)
    }

    #[test]
    fn single_state_lead_always_selected() {
        let (props, d) = corridor();
        let a = nfa(&props, "F p1");
        let (mut g, k0, _) = two_state_graph(&a, &d);
        g.add_node(k0, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let lead = Lead(vec![k0]);
        for i in 1..=50 {
            assert_eq!(
                g.select_high_level_state(&lead, &InverseSquareGuidance::default(), &mut rng),
                Some(k0)
            );
            assert_eq!(g.nsel(&k0), i);
        }
    }

    #[test]
    fn states_without_nodes_are_never_selected() {
        let (props, d) = corridor();
        let a = nfa(&props, "F p1");
        let (mut g, k0, k1) = two_state_graph(&a, &d);
        g.add_node(k1, 3);
        let lead = Lead(vec![k0, k1]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            assert_eq!(
                g.select_high_level_state(&lead, &InverseSquareGuidance::default(), &mut rng),
                Some(k1)
            );
        }
        assert_eq!(
            g.select_high_level_state(&Lead(vec![k0]), &InverseSquareGuidance::default(), &mut rng),
            None
        );
    }

    #[test]
    fn selection_ratio_follows_inverse_square() {
        let (props, d) = corridor();
        let a = nfa(&props, "F p1");
        let (mut g, k0, k1) = two_state_graph(&a, &d);
        g.add_node(k0, 0);
        g.add_node(k1, 1);
        let lead = Lead(vec![k0, k1]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = 170_000;
        let mut hits0 = 0u32;
        for _ in 0..draws {
            g.states.get_mut(&k0).unwrap().nsel = 0;
            g.states.get_mut(&k1).unwrap().nsel = 3;
            if g.select_high_level_state(&lead, &InverseSquareGuidance::default(), &mut rng)
                == Some(k0)
            {
                hits0 += 1;
            }
        }
        let ratio = f64::from(hits0) / f64::from(draws - hits0);
        assert!((ratio - 16.0).abs() < 1.0, "ratio {ratio}");
    }
}
