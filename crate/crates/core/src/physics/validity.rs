use super::{ContactReport, EnvState, World};
use crate::knowledge::{InstKnowledge, ManipClass};

/// Slack on speed bounds to absorb rounding in the velocity clamp.
const SPEED_SLACK: f64 = 1e-9;

/// Accepts a propagated state iff it respects the manipulation constraints in
/// `kappa` (inferred for the state before the step) and the world's bounds.
pub fn validity_check(
    world: &World,
    e_new: &EnvState,
    kappa: &InstKnowledge,
    report: &ContactReport,
) -> bool {
    if report.boundary {
        return false;
    }
    for c in &report.contacts {
        if !world.is_movable(c.body) {
            return false;
        }
        let Some(status) = kappa.status(c.body) else {
            return false;
        };
        if !status.allowed.contains(c.face) || !c.in_mregion {
            return false;
        }
    }
    for &b in &report.moved {
        match kappa.status(b) {
            Some(s) if s.class != ManipClass::TemporarilyFixed => {}
            _ => return false,
        }
    }
    if e_new.robot.v.norm() > world.robot.v_max + SPEED_SLACK {
        return false;
    }
    if world
        .bodies
        .iter()
        .zip(&e_new.bodies)
        .any(|(_, b)| b.vel.norm() > world.params.v_body_max + SPEED_SLACK)
    {
        return false;
    }
    let r = world.robot.radius;
    let p = e_new.robot.p;
    let b = world.bounds;
    p.x - r >= b.min.x && p.x + r <= b.max.x && p.y - r >= b.min.y && p.y + r <= b.max.y
}
