//! Lead-guided sampling planner over the product of the cell decomposition
//! and the task automaton.

mod guidance;
mod product;
mod search;
mod tree;

pub use guidance::{GuidancePolicy, InverseSquareGuidance};
pub use product::{discrete_planning, Lead, ProductGraph, ProductKey, ProductState, SetId};
pub use search::{plan, plan_with, PlanError, PlanResult, PlanStats};
pub use tree::{MotionTree, Node, NodeId};

use std::fmt;

use crate::decomposition::Decomposition;
use crate::ltl::DiscreteTrace;
use crate::physics::{Control, EnvState};

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    /// Wall-clock budget (s).
    pub t_max_s: f64,
    pub n_min: u32,
    pub n_max: u32,
    /// Cell size of the decomposition; `None` picks 1/20 of the shorter
    /// workspace side.
    pub resolution_m: Option<f64>,
    pub seed: u64,
    /// Iterations between lead recomputations.
    pub k_lead: u32,
    /// Consecutive failed expansions that force a new lead.
    pub max_failures: u32,
    /// Use instantiated knowledge and formula simplification. When off, κ
    /// stays at its initial value and the formula is planned as given.
    pub knowledge: bool,
    /// Optional iteration budget, checked alongside the time budget.
    pub max_iterations: Option<u64>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            t_max_s: 300.0,
            n_min: 1,
            n_max: 20,
            resolution_m: None,
            seed: 0,
            k_lead: 10,
            max_failures: 5,
            knowledge: true,
            max_iterations: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InfeasibleReason {
    /// Simplification removed every way of satisfying the formula.
    Unreachable,
    /// The start region already violates the formula.
    RejectedAtStart,
}

impl fmt::Display for InfeasibleReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfeasibleReason::Unreachable => f.write_str("required regions are unreachable"),
            InfeasibleReason::RejectedAtStart => {
                f.write_str("the start region violates the formula")
            }
        }
    }
}

/// A solution: controls with their durations and the states they produce.
/// `states[0]` is the start state and `states[i + 1]` follows `controls[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub controls: Vec<(Control, f64)>,
    pub states: Vec<EnvState>,
    pub trace: DiscreteTrace,
}

impl Trajectory {
    pub fn duration(&self) -> f64 {
        self.controls.iter().map(|(_, dt)| dt).sum()
    }

    pub fn final_state(&self) -> &EnvState {
        self.states
            .last()
            .expect("a trajectory holds at least the start state")
    }

    pub fn trace_of(d: &Decomposition, states: &[EnvState]) -> Option<DiscreteTrace> {
        d.extract_trace(states.iter().map(|s| s.robot.p)).ok()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlanOutcome {
    Solved(Trajectory),
    Infeasible(InfeasibleReason),
    Timeout,
}

impl PlanOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            PlanOutcome::Solved(_) => "solved",
            PlanOutcome::Infeasible(_) => "infeasible",
            PlanOutcome::Timeout => "timeout",
        }
    }
}
