use thiserror::Error;

use super::{BodyKind, Contact, ContactReport, Control, EnvState, World};
use crate::geometry::{Axis, Rect, Vec2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhysicsError {
    #[error("control is not finite")]
    NonFiniteControl,
    #[error("step duration must be positive, got {0}")]
    BadDuration(f64),
}

/// Gaps below this are treated as touching.
const TOUCH: f64 = 1e-12;

/// Advances the world by `dt` under a constant control.
///
/// Each substep integrates velocities first, then moves bodies and the robot
/// one axis at a time with swept clamping, so shapes never overlap.
pub fn propagate(
    world: &World,
    e: &EnvState,
    u: Control,
    dt: f64,
) -> Result<(EnvState, ContactReport), PhysicsError> {
    if !u.u.is_finite() {
        return Err(PhysicsError::NonFiniteControl);
    }
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(PhysicsError::BadDuration(dt));
    }
    let n = world.params.n_substeps.max(1);
    let h = dt / f64::from(n);
    let mut s = e.clone();
    let mut report = ContactReport::default();
    for _ in 0..n {
        substep(world, &mut s, u, h, &mut report);
    }
    s.step += 1;
    report.moved = (0..s.bodies.len())
        .filter(|&i| s.bodies[i].center != e.bodies[i].center)
        .collect();
    Ok((s, report))
}

fn substep(world: &World, s: &mut EnvState, u: Control, h: f64, report: &mut ContactReport) {
    let robot = world.robot;
    let p = &world.params;
    s.robot.v = (s.robot.v + u.u * (h / robot.mass)).clamp_norm(robot.v_max);

    for (i, spec) in world.bodies.iter().enumerate() {
        if spec.kind == BodyKind::Fixed {
            s.bodies[i].vel = Vec2::ZERO;
            continue;
        }
        let v = s.bodies[i].vel;
        let speed = v.norm();
        if speed > 0.0 {
            let slowed = (speed - spec.friction * p.gravity * h).max(0.0);
            s.bodies[i].vel = (v * (slowed / speed)).clamp_norm(p.v_body_max);
        }
    }

    for i in 0..world.bodies.len() {
        if world.bodies[i].kind == BodyKind::Fixed {
            continue;
        }
        for axis in [Axis::X, Axis::Y] {
            let want = s.bodies[i].vel.component(axis) * h;
            if want == 0.0 {
                continue;
            }
            let got = sweep_body(world, s, i, axis, want, true);
            *s.bodies[i].center.component_mut(axis) += got;
            if got.abs() < want.abs() {
                *s.bodies[i].vel.component_mut(axis) = 0.0;
            }
        }
    }

    for axis in [Axis::X, Axis::Y] {
        move_robot(world, s, axis, h, report);
    }
}

/// Distance a disc at `c` can travel along `axis` in direction `dir` before
/// touching `rect`, or `None` if it never does.
fn disc_gap(c: Vec2, r: f64, rect: &Rect, axis: Axis, dir: f64) -> Option<f64> {
    let o = axis.other();
    let co = c.component(o);
    let lateral = (rect.lo(o) - co).max(co - rect.hi(o)).max(0.0);
    if lateral >= r {
        return None;
    }
    let reach = (r * r - lateral * lateral).sqrt();
    let ca = c.component(axis);
    let gap = if dir > 0.0 {
        if rect.hi(axis) <= ca {
            return None;
        }
        rect.lo(axis) - ca - reach
    } else {
        if rect.lo(axis) >= ca {
            return None;
        }
        ca - reach - rect.hi(axis)
    };
    Some(gap.max(0.0))
}

/// Distance box `b` can travel along `axis` in direction `dir` before touching `other`.
fn box_gap(b: &Rect, other: &Rect, axis: Axis, dir: f64) -> Option<f64> {
    let o = axis.other();
    let lateral = b.hi(o).min(other.hi(o)) - b.lo(o).max(other.lo(o));
    if lateral <= TOUCH {
        return None;
    }
    let gap = if dir > 0.0 {
        if other.hi(axis) <= b.hi(axis) {
            return None;
        }
        other.lo(axis) - b.hi(axis)
    } else {
        if other.lo(axis) >= b.lo(axis) {
            return None;
        }
        b.lo(axis) - other.hi(axis)
    };
    Some(gap.max(0.0))
}

/// Clamps a translation of body `i` by `want` along `axis` against walls,
/// other bodies, the workspace bounds and optionally the robot.
fn sweep_body(
    world: &World,
    s: &EnvState,
    i: usize,
    axis: Axis,
    want: f64,
    with_robot: bool,
) -> f64 {
    let dir = want.signum();
    let b = world.body_rect(i, s);
    let mut limit = want.abs();
    let bound_gap = if dir > 0.0 {
        world.bounds.hi(axis) - b.hi(axis)
    } else {
        b.lo(axis) - world.bounds.lo(axis)
    };
    limit = limit.min(bound_gap.max(0.0));
    for j in 0..world.bodies.len() {
        if j == i {
            continue;
        }
        if let Some(g) = box_gap(&b, &world.body_rect(j, s), axis, dir) {
            limit = limit.min(g);
        }
    }
    if with_robot {
        if let Some(g) = disc_gap(s.robot.p, world.robot.radius, &b, axis, -dir) {
            limit = limit.min(g);
        }
    }
    dir * limit
}

fn move_robot(world: &World, s: &mut EnvState, axis: Axis, h: f64, report: &mut ContactReport) {
    let want = s.robot.v.component(axis) * h;
    if want == 0.0 {
        return;
    }
    let dir = want.signum();
    let r = world.robot.radius;
    let p = s.robot.p;
    let mut limit = want.abs();
    let mut blocked = false;

    let bound_gap = if dir > 0.0 {
        world.bounds.hi(axis) - (p.component(axis) + r)
    } else {
        p.component(axis) - r - world.bounds.lo(axis)
    };
    if bound_gap <= limit {
        limit = bound_gap.max(0.0);
        blocked = true;
        report.boundary = true;
    }

    let mut hits: Vec<(f64, usize)> = Vec::new();
    for (j, spec) in world.bodies.iter().enumerate() {
        if let Some(g) = disc_gap(p, r, &world.body_rect(j, s), axis, dir) {
            if spec.kind == BodyKind::Fixed {
                if g <= limit {
                    limit = g;
                    blocked = true;
                    let mut at = p;
                    *at.component_mut(axis) += dir * g;
                    let face = world.body_rect(j, s).contact_face(at);
                    report.record(Contact {
                        body: j,
                        face,
                        in_mregion: false,
                    });
                }
            } else {
                hits.push((g, j));
            }
        }
    }
    hits.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    for (g, j) in hits {
        // Gaps are measured before any push, so an earlier push can only
        // reduce what remains.
        if g > limit {
            break;
        }
        let mut at = p;
        *at.component_mut(axis) += dir * g;
        let rect = world.body_rect(j, s);
        let face = rect.contact_face(at);
        let in_mregion =
            world.bodies[j].mregion_faces.contains(face) && world.mregion(j, s, face).contains(at);
        report.record(Contact {
            body: j,
            face,
            in_mregion,
        });
        if face.axis() != axis {
            // Glancing corner contact: the robot is stopped, nothing is pushed.
            limit = g;
            blocked = true;
            continue;
        }
        let push = limit - g;
        let moved = sweep_body(world, s, j, axis, dir * push, false).abs();
        *s.bodies[j].center.component_mut(axis) += dir * moved;
        limit = g + moved;

        let vr = s.robot.v.component(axis);
        let vb = s.bodies[j].vel.component(axis);
        if dir * (vr - vb) > 0.0 {
            if moved < push {
                *s.bodies[j].vel.component_mut(axis) = 0.0;
                blocked = true;
            } else {
                let mr = world.robot.mass;
                let mb = world.bodies[j].mass;
                let vc = (mr * vr + mb * vb) / (mr + mb);
                *s.robot.v.component_mut(axis) = vc;
                *s.bodies[j].vel.component_mut(axis) = vc;
                s.bodies[j].vel = s.bodies[j].vel.clamp_norm(world.params.v_body_max);
            }
        }
    }

    *s.robot.p.component_mut(axis) += dir * limit;
    if blocked {
        *s.robot.v.component_mut(axis) = 0.0;
    }
}

/// Deepest overlap between any two shapes, or between a shape and the outside
/// of the workspace.
pub fn max_penetration(world: &World, e: &EnvState) -> f64 {
    let r = world.robot.radius;
    let c = e.robot.p;
    let bounds = world.bounds;
    let mut worst = 0.0f64;
    let outside = |rect: &Rect| {
        (bounds.min.x - rect.min.x)
            .max(bounds.min.y - rect.min.y)
            .max(rect.max.x - bounds.max.x)
            .max(rect.max.y - bounds.max.y)
    };
    worst = worst.max(outside(&Rect::new(c.x - r, c.y - r, c.x + r, c.y + r)));
    let rects: Vec<Rect> = (0..world.bodies.len())
        .map(|i| world.body_rect(i, e))
        .collect();
    for (i, a) in rects.iter().enumerate() {
        worst = worst.max(a.disc_penetration(c, r));
        if world.is_movable(i) {
            worst = worst.max(outside(a));
        }
        for (j, b) in rects.iter().enumerate().skip(i + 1) {
            if !world.is_movable(i) && !world.is_movable(j) {
                continue;
            }
            let d = a.overlap_depths(b);
            if d.x > 0.0 && d.y > 0.0 {
                worst = worst.max(d.x.min(d.y));
            }
        }
    }
    worst
}
