//! Planar push world: a disc robot under force control, axis-aligned sliding
//! boxes with Coulomb friction, and fixed walls.

mod propagate;
mod validity;

pub use propagate::{max_penetration, propagate, PhysicsError};
pub use validity::validity_check;

use rand::Rng;

use crate::geometry::{Face, FaceSet, Rect, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicsParams {
    /// Duration of one propagation step (s).
    pub dt: f64,
    /// Semi-implicit Euler substeps per propagation step.
    pub n_substeps: u32,
    pub gravity: f64,
    pub v_body_max: f64,
}

impl Default for PhysicsParams {
    fn default() -> Self {
        PhysicsParams {
            dt: 0.05,
            n_substeps: 10,
            gravity: 9.81,
            v_body_max: 2.0,
        }
    }
}

/// Maximum pairwise overlap tolerated between any two shapes (m).
pub const EPS_PENETRATION: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BodyKind {
    Fixed,
    Movable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BodySpec {
    pub name: String,
    pub kind: BodyKind,
    pub half_extents: Vec2,
    pub mass: f64,
    pub friction: f64,
    /// Faces that carry a manipulation region. Always empty for fixed bodies.
    pub mregion_faces: FaceSet,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotSpec {
    pub radius: f64,
    pub mass: f64,
    pub f_max: f64,
    pub v_max: f64,
}

/// Static description of the world the propagator runs in.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub bounds: Rect,
    pub bodies: Vec<BodySpec>,
    pub robot: RobotSpec,
    pub params: PhysicsParams,
}

impl World {
    /// Depth of every manipulation region: the robot diameter plus 1 cm.
    pub fn mregion_depth(&self) -> f64 {
        2.0 * self.robot.radius + 0.01
    }

    pub fn body_rect(&self, id: usize, e: &EnvState) -> Rect {
        Rect::from_center(e.bodies[id].center, self.bodies[id].half_extents)
    }

    pub fn mregion(&self, id: usize, e: &EnvState, face: Face) -> Rect {
        self.body_rect(id, e).extrude(face, self.mregion_depth())
    }

    pub fn is_movable(&self, id: usize) -> bool {
        self.bodies[id].kind == BodyKind::Movable
    }

    pub fn fixed_rects<'a>(&'a self, e: &'a EnvState) -> impl Iterator<Item = Rect> + 'a {
        (0..self.bodies.len())
            .filter(|&i| !self.is_movable(i))
            .map(move |i| self.body_rect(i, e))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyState {
    pub center: Vec2,
    pub vel: Vec2,
}

/// Robot pose and twist. Orientation and angular velocity are carried for
/// completeness; the disc robot never rotates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RobotState {
    pub p: Vec2,
    pub o: f64,
    pub v: Vec2,
    pub w: f64,
}

/// Dynamic state of the whole environment: every body (fixed ones included,
/// in scene order) and the robot.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnvState {
    pub bodies: Vec<BodyState>,
    pub robot: RobotState,
    pub step: u64,
}

impl EnvState {
    /// Stable digest of every numeric field, used to detect replay divergence.
    pub fn fingerprint(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        let mut put = |v: f64| h.update(v.to_bits().to_le_bytes());
        for b in &self.bodies {
            put(b.center.x);
            put(b.center.y);
            put(b.vel.x);
            put(b.vel.y);
        }
        let r = &self.robot;
        for v in [r.p.x, r.p.y, r.o, r.v.x, r.v.y, r.w] {
            put(v);
        }
        h.update(self.step.to_le_bytes());
        let out = h.finalize();
        out[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Planar force applied at the robot centre (N).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Control {
    pub u: Vec2,
}

impl Control {
    pub fn new(x: f64, y: f64) -> Self {
        Control { u: Vec2::new(x, y) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub body: usize,
    pub face: Face,
    /// Robot centre inside the manipulation region of `face` when touching.
    pub in_mregion: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ContactReport {
    pub contacts: Vec<Contact>,
    /// The robot ran into the workspace boundary.
    pub boundary: bool,
    /// Bodies whose position changed during the step.
    pub moved: Vec<usize>,
}

impl ContactReport {
    pub(crate) fn record(&mut self, c: Contact) {
        match self
            .contacts
            .iter_mut()
            .find(|k| k.body == c.body && k.face == c.face)
        {
            Some(k) => k.in_mregion &= c.in_mregion,
            None => self.contacts.push(c),
        }
    }
}

/// Samples a control uniformly in `[-f_max, f_max]^2` and a repetition count
/// uniformly in `[n_min, n_max]`.
pub fn sample_control<R: Rng + ?Sized>(
    rng: &mut R,
    f_max: f64,
    n_min: u32,
    n_max: u32,
) -> (Control, u32) {
    let ux = rng.random_range(-f_max..=f_max);
    let uy = rng.random_range(-f_max..=f_max);
    let n = rng.random_range(n_min..=n_max);
    (Control::new(ux, uy), n)
}


#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn sampled_controls_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let (c, n) = sample_control(&mut rng, 10.0, 1, 20);
            assert!(c.u.x.abs() <= 10.0 && c.u.y.abs() <= 10.0);
            assert!((1..=20).contains(&n));
        }
    }

    #[test]
    fn sampling_is_reproducible_for_a_seed() {
        let draw = || {
            let mut rng = ChaCha8Rng::seed_from_u64(42);
            (0..50)
                .map(|_| sample_control(&mut rng, 10.0, 1, 20))
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(), draw());
    }

    #[test]
    fn step_counts_cover_the_whole_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut seen = [0u32; 21];
        for _ in 0..10_000 {
            seen[sample_control(&mut rng, 1.0, 1, 20).1 as usize] += 1;
        }
        assert_eq!(seen[0], 0);
        // each of the 20 values expects 500 draws
        assert!(seen[1..].iter().all(|&k| k > 350 && k < 650), "{seen:?}");
    }
}
