use std::rc::Rc;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::guidance::{GuidancePolicy, InverseSquareGuidance};
use super::product::{discrete_planning, Lead, ProductGraph, ProductKey};
use super::tree::{MotionTree, NodeId};
use super::{InfeasibleReason, PlanOutcome, PlannerConfig, Trajectory};
use crate::decomposition::{decompose, DecompError, Decomposition};
use crate::knowledge::{
    evaluate, infer_initial, inference, AbstractKnowledge, KnowledgeError, NonvalidSet,
};
use crate::ltl::{to_pnf, trace_satisfies, Formula, Nfa, NfaError, NotCoSafe};
use crate::physics::{propagate, sample_control, validity_check, PhysicsError};
use crate::scene::Scene;

#[derive(Debug, Error)]
pub enum PlanError {
    #[error(transparent)]
    NotCoSafe(#[from] NotCoSafe),
    #[error(transparent)]
    Automaton(#[from] NfaError),
    #[error(transparent)]
    Decomposition(#[from] DecompError),
    #[error(transparent)]
    Knowledge(#[from] KnowledgeError),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlanStats {
    pub iterations: u64,
    pub tree_size: usize,
    pub product_states: usize,
    pub leads: u64,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub outcome: PlanOutcome,
    /// The formula actually planned for; `None` when simplification proved
    /// the task infeasible.
    pub psi: Option<Formula>,
    pub nonvalid: NonvalidSet,
    pub stats: PlanStats,
}

/// Plans with the default guidance policy.
pub fn plan(scene: &Scene, phi: &Formula, config: &PlannerConfig) -> Result<PlanResult, PlanError> {
    plan_with(scene, phi, config, &InverseSquareGuidance::default())
}

pub fn plan_with(
    scene: &Scene,
    phi: &Formula,
    config: &PlannerConfig,
    policy: &dyn GuidancePolicy,
) -> Result<PlanResult, PlanError> {
    let clock = Instant::now();
    let world = &scene.world;
    let k = AbstractKnowledge::from_world(world);
    let kappa0 = Rc::new(infer_initial(&k, &scene.init)?);

    let workspace = scene.workspace();
    let resolution = config
        .resolution_m
        .unwrap_or_else(|| workspace.default_resolution());
    let d = decompose(&workspace, resolution)?;

    let phi = to_pnf(phi)?;
    let (nonvalid, psi) = if config.knowledge {
        evaluate(&phi, &scene.props, &d, scene.start())?
    } else {
        (NonvalidSet::new(), Some(phi))
    };
    let mut stats = PlanStats::default();
    let finish = |outcome, psi, stats: PlanStats| PlanResult {
        outcome,
        psi,
        nonvalid: nonvalid.clone(),
        stats,
    };
    let Some(psi) = psi else {
        stats.elapsed_s = clock.elapsed().as_secs_f64();
        return Ok(finish(
            PlanOutcome::Infeasible(InfeasibleReason::Unreachable),
            None,
            stats,
        ));
    };

    let nfa = Nfa::build(&psi, scene.props.len())?;
    let mut graph = ProductGraph::new(&nfa, &d);
    let (cell0, label0) = d.locate(scene.start()).map_err(KnowledgeError::from)?;
    let set0 = graph.step(graph.initial(), label0);
    if graph.is_dead(set0) {
        stats.elapsed_s = clock.elapsed().as_secs_f64();
        return Ok(finish(
            PlanOutcome::Infeasible(InfeasibleReason::RejectedAtStart),
            Some(psi),
            stats,
        ));
    }
    let key0 = ProductKey {
        cell: cell0,
        set: set0,
    };
    let movable: Vec<usize> = (0..world.bodies.len())
        .filter(|&i| world.is_movable(i))
        .collect();
    let mut tree = MotionTree::new(scene.init.clone(), movable, kappa0.clone(), key0);
    if graph.is_accepting(set0) {
        let traj = finish_trajectory(&tree, tree.root(), &d, &psi)?;
        stats.tree_size = 1;
        stats.elapsed_s = clock.elapsed().as_secs_f64();
        return Ok(finish(PlanOutcome::Solved(traj), Some(psi), stats));
    }
    graph.add_node(key0, tree.root());

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let dt = world.params.dt;
    let mut lead = Lead::default();
    let mut since_lead = u32::MAX;
    let mut failures = 0u32;

    let solved = loop {
        if clock.elapsed().as_secs_f64() >= config.t_max_s
            || config.max_iterations.is_some_and(|m| stats.iterations >= m)
        {
            break None;
        }
        stats.iterations += 1;

        if lead.is_empty() || since_lead >= config.k_lead || failures >= config.max_failures {
            let sources: Vec<(ProductKey, f64)> = graph
                .frontier()
                .map(|(key, s)| (*key, policy.source_cost(s.nsel)))
                .collect();
            lead = discrete_planning(&mut graph, &sources, policy);
            stats.leads += 1;
            since_lead = 0;
            failures = 0;
        }
        since_lead += 1;

        let selected = match graph.select_high_level_state(&lead, policy, &mut rng) {
            Some(key) => Some(key),
            None => graph.select_any(&mut rng),
        };
        let Some(v) = selected else {
            break None;
        };
        let nodes = &graph.state(&v).expect("selected state exists").nodes;
        let mut parent: NodeId = nodes[rng.random_range(0..nodes.len())];

        let (u, n) = sample_control(&mut rng, world.robot.f_max, config.n_min, config.n_max);
        let mut e = tree.env(parent);
        let mut kappa = tree.node(parent).kappa.clone();
        let mut key = tree.node(parent).key;
        let mut added = 0;
        let mut reached = None;
        for _ in 0..n {
            let (e_new, report) = propagate(world, &e, u, dt)?;
            if !validity_check(world, &e_new, &kappa, &report) {
                break;
            }
            let Ok((cell, _)) = d.locate(e_new.robot.p) else {
                break;
            };
            if config.knowledge && !report.moved.is_empty() {
                let next = inference(&k, &e_new, &kappa);
                if next != *kappa {
                    kappa = Rc::new(next);
                }
            }
            key = graph.advance(key, cell);
            let id = tree.add(parent, &e_new, kappa.clone(), u, dt, key);
            added += 1;
            if graph.is_dead(key.set) {
                break;
            }
            graph.add_node(key, id);
            if graph.is_accepting(key.set) {
                reached = Some(id);
                break;
            }
            parent = id;
            e = e_new;
        }
        if added == 0 {
            failures += 1;
        } else {
            failures = 0;
        }
        if reached.is_some() {
            break reached;
        }
    };

    stats.tree_size = tree.len();
    stats.product_states = graph.num_states();
    let outcome = match solved {
        Some(leaf) => PlanOutcome::Solved(finish_trajectory(&tree, leaf, &d, &psi)?),
        None => PlanOutcome::Timeout,
    };
    stats.elapsed_s = clock.elapsed().as_secs_f64();
    Ok(finish(outcome, Some(psi), stats))
}

fn finish_trajectory(
    tree: &MotionTree,
    leaf: NodeId,
    d: &Decomposition,
    psi: &Formula,
) -> Result<Trajectory, PlanError> {
    let traj = tree.retrieve_trajectory(leaf, d);
    if !trace_satisfies(psi, &traj.trace) {
        return Err(PlanError::Internal(format!(
            "retrieved trace {:?} does not satisfy the formula",
            traj.trace
        )));
    }
    Ok(traj)
}
