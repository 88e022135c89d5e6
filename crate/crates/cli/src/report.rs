use serde::{Deserialize, Serialize};

use cosafe_core::physics::BodyKind;
use cosafe_core::planner::{PlanOutcome, PlanResult};
use cosafe_core::scene::Scene;
use cosafe_core::{EnvState, Formula, Rect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Solved,
    Infeasible,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedRect {
    pub name: String,
    pub rect: [f64; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyPose {
    pub name: String,
    pub fixed: bool,
    pub start: [f64; 4],
    pub end: [f64; 4],
}

/// Everything needed to draw a run without the scene file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    pub bounds: [f64; 4],
    pub regions: Vec<NamedRect>,
    pub bodies: Vec<BodyPose>,
    pub robot_radius: f64,
    pub path: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub outcome: Outcome,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub reason: Option<String>,
    pub formula: String,
    /// Formula after simplification; absent when the task is infeasible.
    pub psi: Option<String>,
    pub nonvalid: Vec<String>,
    pub knowledge: bool,
    pub seed: u64,
    pub wall_time_s: f64,
    pub iterations: u64,
    pub tree_size: usize,
    pub trace: Vec<String>,
    pub steps: usize,
    pub geometry: Geometry,
}

pub(crate) fn rect4(r: &Rect) -> [f64; 4] {
    [r.min.x, r.min.y, r.max.x, r.max.y]
}

impl RunReport {
    pub fn new(
        scene: &Scene,
        phi: &Formula,
        result: &PlanResult,
        seed: u64,
        knowledge: bool,
    ) -> Self {
        let props = &scene.props;
        let (outcome, reason) = match &result.outcome {
            PlanOutcome::Solved(_) => (Outcome::Solved, None),
            PlanOutcome::Infeasible(why) => (Outcome::Infeasible, Some(why.to_string())),
            PlanOutcome::Timeout => (Outcome::Timeout, None),
        };
        let (trace, steps, states): (Vec<String>, usize, &[EnvState]) = match &result.outcome {
            PlanOutcome::Solved(t) => (
                t.trace.iter().map(|p| props.name(*p).to_string()).collect(),
                t.controls.len(),
                &t.states,
            ),
            _ => (Vec::new(), 0, std::slice::from_ref(&scene.init)),
        };
        let last = states.last().expect("at least the start state");
        let w = &scene.world;
        RunReport {
            outcome,
            reason,
            formula: phi.display(props).to_string(),
            psi: result.psi.as_ref().map(|f| f.display(props).to_string()),
            nonvalid: result
                .nonvalid
                .props()
                .map(|p| props.name(p).to_string())
                .collect(),
            knowledge,
            seed,
            wall_time_s: result.stats.elapsed_s,
            iterations: result.stats.iterations,
            tree_size: result.stats.tree_size,
            trace,
            steps,
            geometry: Geometry {
                bounds: rect4(&w.bounds),
                regions: scene
                    .regions
                    .iter()
                    .map(|(p, r)| NamedRect {
                        name: props.name(*p).to_string(),
                        rect: rect4(r),
                    })
                    .collect(),
                bodies: (0..w.bodies.len())
                    .map(|i| BodyPose {
                        name: w.bodies[i].name.clone(),
                        fixed: w.bodies[i].kind == BodyKind::Fixed,
                        start: rect4(&w.body_rect(i, &scene.init)),
                        end: rect4(&w.body_rect(i, last)),
                    })
                    .collect(),
                robot_radius: w.robot.radius,
                path: states.iter().map(|s| [s.robot.p.x, s.robot.p.y]).collect(),
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.outcome {
            Outcome::Solved => crate::EXIT_SOLVED,
            Outcome::Infeasible => crate::EXIT_INFEASIBLE,
            Outcome::Timeout => crate::EXIT_TIMEOUT,
        }
    }
}
