//! Nested-list view of a formula.
//!
//! Every syntax node is a list. A list records its enclosing list, its depth
//! (the root is depth 0) and its 1-based order among its siblings, plus the
//! operators that attach it inside its parent: the parent's connective and,
//! when the list itself starts with a unary operator, that prefix too.

use std::collections::BTreeSet;

use super::formula::{Formula, PropId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ListOp {
    Not,
    Next,
    Eventually,
    And,
    Or,
    Until,
}

impl ListOp {
    fn of(f: &Formula) -> Option<ListOp> {
        match f {
            Formula::Not(_) => Some(ListOp::Not),
            Formula::Next(_) => Some(ListOp::Next),
            Formula::Eventually(_) => Some(ListOp::Eventually),
            Formula::And(..) => Some(ListOp::And),
            Formula::Or(..) => Some(ListOp::Or),
            Formula::Until(..) => Some(ListOp::Until),
            _ => None,
        }
    }

    pub fn is_unary(self) -> bool {
        matches!(self, ListOp::Not | ListOp::Next | ListOp::Eventually)
    }
}

pub type ListId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct ListNode {
    pub parent: Option<ListId>,
    pub op: BTreeSet<ListOp>,
    pub depth: usize,
    pub order: usize,
    pub children: Vec<ListId>,
    /// The node itself with children erased (leaves keep their payload).
    head: Formula,
}

impl ListNode {
    pub fn atom(&self) -> Option<PropId> {
        match self.head {
            Formula::Atom(p) => Some(p),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ListView {
    nodes: Vec<ListNode>,
}

impl ListView {
    pub fn build(f: &Formula) -> ListView {
        let mut v = ListView { nodes: Vec::new() };
        v.add(f, None, 0, 1);
        v
    }

    fn add(&mut self, f: &Formula, parent: Option<ListId>, depth: usize, order: usize) -> ListId {
        let id = self.nodes.len();
        let mut op = BTreeSet::new();
        if let Some(p) = parent {
            if let Some(o) = ListOp::of(&self.nodes[p].head) {
                op.insert(o);
            }
        }
        if let Some(o) = ListOp::of(f).filter(|o| o.is_unary()) {
            op.insert(o);
        }
        let head = match f {
            Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
            Formula::Not(_) => Formula::not(Formula::True),
            Formula::Next(_) => Formula::next(Formula::True),
            Formula::Eventually(_) => Formula::eventually(Formula::True),
            Formula::And(..) => Formula::and(Formula::True, Formula::True),
            Formula::Or(..) => Formula::or(Formula::True, Formula::True),
            Formula::Until(..) => Formula::until(Formula::True, Formula::True),
        };
        self.nodes.push(ListNode {
            parent,
            op,
            depth,
            order,
            children: Vec::new(),
            head,
        });
        for (i, c) in f.children().into_iter().enumerate() {
            let cid = self.add(c, Some(id), depth + 1, i + 1);
            self.nodes[id].children.push(cid);
        }
        id
    }

    pub fn root(&self) -> ListId {
        0
    }

    pub fn node(&self, id: ListId) -> &ListNode {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Lists `{p}` for every occurrence of `p`, leftmost first.
    pub fn atom_lists(&self, p: PropId) -> Vec<ListId> {
        // Node ids are assigned in preorder, so id order is left-to-right.
        (0..self.nodes.len())
            .filter(|&i| self.nodes[i].atom() == Some(p))
            .collect()
    }

    /// Parent chain from `id` (exclusive) up to the root (inclusive).
    pub fn ancestors(&self, id: ListId) -> Vec<ListId> {
        let mut out = Vec::new();
        let mut cur = self.nodes[id].parent;
        while let Some(p) = cur {
            out.push(p);
            cur = self.nodes[p].parent;
        }
        out
    }

    pub fn to_formula(&self) -> Formula {
        self.subformula(self.root())
    }

    pub fn subformula(&self, id: ListId) -> Formula {
        self.rebuild(id, None)
    }

    /// The formula with list `id` deleted from its disjunction: the enclosing
    /// `|` collapses onto the remaining operand. `None` if the parent of `id`
    /// is not a disjunction.
    pub fn remove_disjunct(&self, id: ListId) -> Option<Formula> {
        let parent = self.nodes[id].parent?;
        if !matches!(self.nodes[parent].head, Formula::Or(..)) {
            return None;
        }
        let sibling = *self.nodes[parent].children.iter().find(|&&c| c != id)?;
        Some(self.rebuild(self.root(), Some((parent, sibling))))
    }

    fn rebuild(&self, id: ListId, splice: Option<(ListId, ListId)>) -> Formula {
        if let Some((at, with)) = splice {
            if id == at {
                return self.rebuild(with, splice);
            }
        }
        let n = &self.nodes[id];
        let kid = |i: usize| self.rebuild(n.children[i], splice);
        match n.head {
            Formula::True | Formula::False | Formula::Atom(_) => n.head.clone(),
            Formula::Not(_) => Formula::not(kid(0)),
            Formula::Next(_) => Formula::next(kid(0)),
            Formula::Eventually(_) => Formula::eventually(kid(0)),
            Formula::And(..) => Formula::and(kid(0), kid(1)),
            Formula::Or(..) => Formula::or(kid(0), kid(1)),
            Formula::Until(..) => Formula::until(kid(0), kid(1)),
        }
    }
}
