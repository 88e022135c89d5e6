use std::rc::Rc;

use super::product::ProductKey;
use super::Trajectory;
use crate::decomposition::Decomposition;
use crate::knowledge::InstKnowledge;
use crate::physics::{BodyState, Control, EnvState, RobotState};

pub type NodeId = u32;

/// A tree node stores only what changes: the robot and the movable bodies.
#[derive(Debug, Clone)]
pub struct Node {
    pub parent: Option<NodeId>,
    pub robot: RobotState,
    pub movable: Box<[BodyState]>,
    pub step: u64,
    pub kappa: Rc<InstKnowledge>,
    /// Control and duration that produced this node from its parent.
    pub control: Control,
    pub dt: f64,
    pub key: ProductKey,
}

#[derive(Debug, Clone)]
pub struct MotionTree {
    template: EnvState,
    movable_ids: Vec<usize>,
    nodes: Vec<Node>,
}

impl MotionTree {
    pub fn new(
        root: EnvState,
        movable_ids: Vec<usize>,
        kappa: Rc<InstKnowledge>,
        key: ProductKey,
    ) -> Self {
        let movable = movable_ids.iter().map(|&i| root.bodies[i]).collect();
        let node = Node {
            parent: None,
            robot: root.robot,
            movable,
            step: root.step,
            kappa,
            control: Control::default(),
            dt: 0.0,
            key,
        };
        MotionTree {
            template: root,
            movable_ids,
            nodes: vec![node],
        }
    }

    pub fn root(&self) -> NodeId {
        0
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn add(
        &mut self,
        parent: NodeId,
        e: &EnvState,
        kappa: Rc<InstKnowledge>,
        control: Control,
        dt: f64,
        key: ProductKey,
    ) -> NodeId {
        let id = self.nodes.len() as NodeId;
        self.nodes.push(Node {
            parent: Some(parent),
            robot: e.robot,
            movable: self.movable_ids.iter().map(|&i| e.bodies[i]).collect(),
            step: e.step,
            kappa,
            control,
            dt,
            key,
        });
        id
    }

    /// Full environment state of a node.
    pub fn env(&self, id: NodeId) -> EnvState {
        let n = self.node(id);
        let mut e = self.template.clone();
        for (slot, &i) in self.movable_ids.iter().enumerate() {
            e.bodies[i] = n.movable[slot];
        }
        e.robot = n.robot;
        e.step = n.step;
        e
    }

    /// Node ids from the root to `leaf`, inclusive.
    pub fn path(&self, leaf: NodeId) -> Vec<NodeId> {
        let mut out = vec![leaf];
        let mut cur = leaf;
        while let Some(p) = self.node(cur).parent {
            out.push(p);
            cur = p;
        }
        out.reverse();
        out
    }

    /// Root-to-leaf controls and states with the trace they induce.
    pub fn retrieve_trajectory(&self, leaf: NodeId, d: &Decomposition) -> Trajectory {
        let path = self.path(leaf);
        let states: Vec<EnvState> = path.iter().map(|&id| self.env(id)).collect();
        let controls = path[1..]
            .iter()
            .map(|&id| (self.node(id).control, self.node(id).dt))
            .collect();
        let trace = Trajectory::trace_of(d, &states).expect("tree states lie in free space");
        Trajectory {
            controls,
            states,
            trace,
        }
    }
}
