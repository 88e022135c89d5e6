//! End-to-end planner runs on the bundled scenes, plus trajectory file
//! round-trips and replay.

use std::path::Path;

use cosafe_core::ltl::{parse_formula, trace_satisfies, Formula};
use cosafe_core::physics::{max_penetration, EPS_PENETRATION};
use cosafe_core::planner::{
    plan, InfeasibleReason, PlanOutcome, PlanResult, PlannerConfig, Trajectory,
};
use cosafe_core::scene::Scene;
use cosafe_core::trajectory::{TrajectoryError, TrajectoryFile};
use cosafe_core::{decompose, PropId};

fn scene(name: &str) -> Scene {
    Scene::load(
        &Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("../../scenes")
            .join(name),
    )
    .unwrap()
}

fn config(s: &Scene, seed: u64, knowledge: bool) -> PlannerConfig {
    PlannerConfig {
        seed,
        knowledge,
        t_max_s: 60.0,
        ..s.planner.clone()
    }
}

fn run(s: &Scene, formula: &str, seed: u64, knowledge: bool) -> (Formula, PlanResult) {
    let phi = parse_formula(formula, &s.props).unwrap();
    let r = plan(s, &phi, &config(s, seed, knowledge)).unwrap();
    (phi, r)
}

fn solved(r: &PlanResult) -> &Trajectory {
    match &r.outcome {
        PlanOutcome::Solved(t) => t,
        other => panic!("expected a solution, got {other:?}"),
    }
}

fn ids(t: &[PropId]) -> Vec<u16> {
    t.iter().map(|p| p.0).collect()
}

#[test]
fn enclosed_conjunctive_task_is_infeasible_without_search() {
    let s = scene("choice.scene");
    let (_, r) = run(&s, "F p1 & F p3", 0, true);
    assert_eq!(
        r.outcome,
        PlanOutcome::Infeasible(InfeasibleReason::Unreachable)
    );
    assert_eq!(r.psi, None);
    assert_eq!(r.stats.iterations, 0);
    assert_eq!(r.stats.tree_size, 0);
}

#[test]
fn start_state_violating_the_formula_is_infeasible() {
    let s = scene("open.scene");
    let (_, r) = run(&s, "p1", 0, true);
    assert_eq!(
        r.outcome,
        PlanOutcome::Infeasible(InfeasibleReason::RejectedAtStart)
    );
}

#[test]
fn accepting_start_returns_empty_trajectory() {
    let s = scene("open.scene");
    let (_, r) = run(&s, "F p0", 0, true);
    let t = solved(&r);
    assert!(t.controls.is_empty());
    assert_eq!(ids(&t.trace), vec![0]);
    assert_eq!(r.stats.iterations, 0);
}

#[test]
fn choice_scene_takes_the_reachable_branch() {
    let s = scene("choice.scene");
    let (_, r) = run(&s, "F p1 | (F p2 & F p3)", 4, true);
    assert_eq!(
        r.psi
            .as_ref()
            .map(|f| f.display(&s.props).to_string())
            .as_deref(),
        Some("F p1")
    );
    let t = solved(&r);
    assert!(t.trace.contains(&PropId(1)));
}

#[test]
fn knowledge_off_keeps_the_formula() {
    let s = scene("choice.scene");
    let (phi, r) = run(&s, "F p1 | (F p2 & F p3)", 4, false);
    assert_eq!(r.psi.as_ref(), Some(&phi));
    assert!(r.nonvalid.is_empty());
    assert!(trace_satisfies(&phi, &solved(&r).trace));
}

#[test]
fn scenario_b_visits_regions_in_order() {
    let s = scene("scenario_b.scene");
    let (phi, r) = run(&s, "F(p1 & F(p3 & F(p2 & F p4)))", 0, true);
    let t = solved(&r);
    assert!(trace_satisfies(&phi, &t.trace));
    let visits: Vec<u16> = ids(&t.trace).into_iter().filter(|&p| p != 0).collect();
    let order: Vec<usize> = [1u16, 3, 2, 4]
        .iter()
        .map(|p| visits.iter().position(|v| v == p).unwrap())
        .collect();
    assert!(order.windows(2).all(|w| w[0] < w[1]), "{visits:?}");
    for e in &t.states {
        assert!(max_penetration(&s.world, e) <= EPS_PENETRATION);
    }
}

#[test]
fn same_seed_gives_identical_trajectories() {
    let s = scene("scenario_b.scene");
    let f = "F(p1 & F(p3 & F(p2 & F p4)))";
    let (_, a) = run(&s, f, 7, true);
    let (_, b) = run(&s, f, 7, true);
    let (ta, tb) = (solved(&a), solved(&b));
    assert_eq!(ta.controls, tb.controls);
    assert_eq!(ta.states, tb.states);
    assert_eq!(a.stats.tree_size, b.stats.tree_size);
}

#[test]
fn trajectory_file_round_trips_and_replays_bitwise() {
    let s = scene("scenario_b.scene");
    let (phi, r) = run(&s, "F(p1 & F(p3 & F(p2 & F p4)))", 1, true);
    let t = solved(&r);
    let file = TrajectoryFile::from_plan(t, 1, true, s.world.params);
    let text = file.to_text();
    let parsed = TrajectoryFile::parse(&text).unwrap();
    assert_eq!(parsed, file);
    assert_eq!(parsed.to_text(), text);

    let w = s.workspace();
    let d = decompose(&w, w.default_resolution()).unwrap();
    let replay = parsed.replay(&s, &d).unwrap();
    assert_eq!(replay.states, t.states);
    assert_eq!(replay.invalid_step, None);
    assert_eq!(replay.trace.as_ref(), Some(&t.trace));
    assert!(trace_satisfies(&phi, replay.trace.as_ref().unwrap()));
}

#[test]
fn tampered_trajectory_files_are_detected() {
    let s = scene("open.scene");
    let (phi, r) = run(&s, "F(p1 & F p2)", 3, true);
    let t = solved(&r);
    let file = TrajectoryFile::from_plan(t, 3, true, s.world.params);
    let w = s.workspace();
    let d = decompose(&w, w.default_resolution()).unwrap();

    let mut edited = file.clone();
    let k = edited.steps.len() / 2;
    edited.steps[k].control.u.x += 0.5;
    assert_eq!(
        edited.replay(&s, &d),
        Err(TrajectoryError::Divergence { step: k + 1 })
    );

    let mut moved = file.clone();
    moved.start = "0000000000000000".into();
    assert_eq!(moved.replay(&s, &d), Err(TrajectoryError::StartMismatch));

    // stop one step before the robot first enters p2
    let cut = t
        .states
        .iter()
        .position(|e| d.locate(e.robot.p).map(|(_, p)| p) == Ok(PropId(2)))
        .unwrap();
    let mut short = file.clone();
    short.steps.truncate(cut - 1);
    let replay = short.replay(&s, &d).unwrap();
    assert!(!trace_satisfies(&phi, replay.trace.as_ref().unwrap()));
}

#[test]
fn malformed_trajectory_text_reports_line() {
    let good = "cosafe-tamp/1\ntrajectory\nseed 1\nmode knowledge\nphysics dt_s=0.05 n_substeps=10 gravity=9.81 v_body_max=2\nstart 00\n";
    assert!(TrajectoryFile::parse(good).unwrap().steps.is_empty());
    let cases = [
        (good.replace("cosafe-tamp/1", "cosafe-tamp/0"), 1),
        (good.replace("mode knowledge", "mode maybe"), 4),
        (good.replace("gravity=9.81 ", ""), 5),
        (format!("{good}step 1 nan 0.05 00\n"), 7),
        (format!("{good}step 1 2 0.05\n"), 7),
    ];
    for (text, line) in cases {
        match TrajectoryFile::parse(&text) {
            Err(TrajectoryError::Syntax { line: l, .. }) => assert_eq!(l, line, "{text}"),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }
}
