//! Randomized checks of the push propagator over many short rollouts.

use cosafe_core::geometry::{FaceSet, Rect, Vec2};
use cosafe_core::physics::{
    max_penetration, propagate, sample_control, BodyKind, BodySpec, BodyState, EnvState,
    PhysicsParams, RobotSpec, RobotState, World,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A 10x10 scene on a 5x5 slot grid: each slot holds nothing, a wall or a
/// box with random size and offset, so shapes never start overlapping.
fn random_scene(rng: &mut ChaCha8Rng) -> (World, EnvState) {
    let mut bodies = Vec::new();
    let mut states = Vec::new();
    let mut free_slots = Vec::new();
    for ix in 0..5 {
        for iy in 0..5 {
            let slot = Rect::new(
                ix as f64 * 2.0,
                iy as f64 * 2.0,
                ix as f64 * 2.0 + 2.0,
                iy as f64 * 2.0 + 2.0,
            );
            let roll: f64 = rng.random();
            if roll < 0.45 {
                free_slots.push(slot);
                continue;
            }
            let hx = rng.random_range(0.15..0.8);
            let hy = rng.random_range(0.15..0.8);
            let cx = rng.random_range(slot.min.x + hx..slot.max.x - hx);
            let cy = rng.random_range(slot.min.y + hy..slot.max.y - hy);
            let kind = if roll < 0.6 {
                BodyKind::Fixed
            } else {
                BodyKind::Movable
            };
            bodies.push(BodySpec {
                name: format!("b{}", bodies.len()),
                kind,
                half_extents: Vec2::new(hx, hy),
                mass: rng.random_range(0.3..3.0),
                friction: rng.random_range(0.05..0.8),
                mregion_faces: if kind == BodyKind::Movable {
                    FaceSet::ALL
                } else {
                    FaceSet::EMPTY
                },
            });
            states.push(BodyState {
                center: Vec2::new(cx, cy),
                vel: Vec2::ZERO,
            });
        }
    }
    if free_slots.is_empty() {
        free_slots.push(Rect::new(0.0, 0.0, 2.0, 2.0));
        bodies.clear();
        states.clear();
    }
    let slot = free_slots[rng.random_range(0..free_slots.len())];
    let world = World {
        bounds: Rect::new(0.0, 0.0, 10.0, 10.0),
        bodies,
        robot: RobotSpec {
            radius: rng.random_range(0.1..0.3),
            mass: rng.random_range(0.5..2.0),
            f_max: 10.0,
            v_max: 2.0,
        },
        params: PhysicsParams::default(),
    };
    let e = EnvState {
        bodies: states,
        robot: RobotState {
            p: slot.center(),
            ..Default::default()
        },
        step: 0,
    };
    (world, e)
}

fn contained(world: &World, e: &EnvState) -> bool {
    let b = world.bounds;
    (0..world.bodies.len()).all(|i| b.contains_rect(&world.body_rect(i, e), 1e-9))
}

const ROLLOUTS: u32 = 100;
const STEPS_PER_ROLLOUT: usize = 1000;

proptest! {
    #![proptest_config(ProptestConfig { cases: ROLLOUTS, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn propagation_invariants(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (world, mut e) = random_scene(&mut rng);
        let dt = world.params.dt;
        let mut steps = 0;
        while steps < STEPS_PER_ROLLOUT {
            let (u, n) = sample_control(&mut rng, world.robot.f_max, 1, 20);
            for _ in 0..n {
                if steps == STEPS_PER_ROLLOUT {
                    break;
                }
                steps += 1;
                let (next, report) = propagate(&world, &e, u, dt).unwrap();

                let again = propagate(&world, &e, u, dt).unwrap();
                prop_assert_eq!(&again.0, &next);
                prop_assert_eq!(&again.1, &report);
                prop_assert_eq!(next.fingerprint(), again.0.fingerprint());

                for (i, spec) in world.bodies.iter().enumerate() {
                    let before = e.bodies[i];
                    let after = next.bodies[i];
                    let touched = report.contacts.iter().any(|c| c.body == i);
                    if spec.kind == BodyKind::Fixed {
                        prop_assert_eq!(before.center, after.center);
                        continue;
                    }
                    if before.vel == Vec2::ZERO && !touched {
                        prop_assert_eq!(before.center, after.center, "body {} moved without contact", i);
                    }
                    if !touched {
                        prop_assert!(after.vel.norm() <= before.vel.norm() + 1e-12,
                            "body {} sped up without contact", i);
                    }
                    prop_assert!(after.vel.norm() <= world.params.v_body_max + 1e-9);
                }
                prop_assert!(next.robot.v.norm() <= world.robot.v_max + 1e-9);
                let pen = max_penetration(&world, &next);
                prop_assert!(pen <= 1e-3, "penetration {} at step {}", pen, steps);
                prop_assert!(contained(&world, &next));
                e = next;
            }
        }
    }
}

#[test]
fn isolated_box_comes_to_rest() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let mu = rng.random_range(0.05..1.0);
        let world = World {
            bounds: Rect::new(-100.0, -100.0, 100.0, 100.0),
            bodies: vec![BodySpec {
                name: "b".into(),
                kind: BodyKind::Movable,
                half_extents: Vec2::new(0.5, 0.5),
                mass: 1.0,
                friction: mu,
                mregion_faces: FaceSet::ALL,
            }],
            robot: RobotSpec {
                radius: 0.2,
                mass: 1.0,
                f_max: 10.0,
                v_max: 2.0,
            },
            params: PhysicsParams::default(),
        };
        let v = Vec2::new(rng.random_range(-1.4..1.4), rng.random_range(-1.4..1.4));
        let mut e = EnvState {
            bodies: vec![BodyState {
                center: Vec2::ZERO,
                vel: v,
            }],
            robot: RobotState {
                p: Vec2::new(50.0, 50.0),
                ..Default::default()
            },
            step: 0,
        };
        // speed drops by mu * g * dt per step
        let bound = (v.norm() / (mu * 9.81 * world.params.dt)).ceil() as usize + 1;
        let mut last = v.norm();
        for _ in 0..bound {
            e = propagate(&world, &e, Default::default(), world.params.dt)
                .unwrap()
                .0;
            let s = e.bodies[0].vel.norm();
            assert!(s <= last);
            last = s;
        }
        assert_eq!(last, 0.0, "mu {mu} v {v:?}");
    }
}

#[test]
fn random_rollouts_do_push_boxes() {
    let mut pushes = 0;
    let mut box_steps = 0;
    for seed in 0..20 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (world, mut e) = random_scene(&mut rng);
        for _ in 0..100 {
            let (u, n) = sample_control(&mut rng, world.robot.f_max, 1, 20);
            for _ in 0..n {
                let (next, report) = propagate(&world, &e, u, world.params.dt).unwrap();
                pushes += report
                    .contacts
                    .iter()
                    .filter(|c| world.is_movable(c.body))
                    .count();
                box_steps += report.moved.len();
                e = next;
            }
        }
    }
    eprintln!("{pushes} push contacts, {box_steps} body-steps of motion");
    assert!(pushes > 100 && box_steps > 100);
}
