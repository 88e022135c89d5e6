//! Abstract knowledge about the scene, per-state manipulation constraints
//! inferred from it, and reachability-driven formula simplification.

mod simplify;

pub use simplify::{evaluate, evaluate_with, prune_negated, simplify};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::decomposition::{Decomposition, LocateError};
use crate::geometry::{Face, FaceSet, Rect, Vec2};
use crate::ltl::{PropId, PropTable};
use crate::physics::{BodyKind, EnvState, World};

/// Overlap area below which two rectangles count as disjoint (m²).
pub const OCCUPANCY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BodyRecord {
    pub name: String,
    pub kind: BodyKind,
    pub mass: f64,
    pub friction: f64,
    pub half_extents: Vec2,
    pub mregions: Vec<(Face, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotRecord {
    pub radius: f64,
    pub mass: f64,
    pub f_max: f64,
    pub v_max: f64,
}

/// Static facts about every body and the robot. Fixed for a whole planning run.
#[derive(Debug, Clone, PartialEq)]
pub struct AbstractKnowledge {
    pub bounds: Rect,
    pub bodies: Vec<BodyRecord>,
    pub robot: RobotRecord,
    /// Temporal and boolean operators the formula vocabulary admits.
    pub operators: Vec<&'static str>,
}

impl AbstractKnowledge {
    pub fn from_world(world: &World) -> Self {
        let depth = world.mregion_depth();
        AbstractKnowledge {
            bounds: world.bounds,
            bodies: world
                .bodies
                .iter()
                .map(|b| BodyRecord {
                    name: b.name.clone(),
                    kind: b.kind,
                    mass: b.mass,
                    friction: b.friction,
                    half_extents: b.half_extents,
                    mregions: b.mregion_faces.iter().map(|f| (f, depth)).collect(),
                })
                .collect(),
            robot: RobotRecord {
                radius: world.robot.radius,
                mass: world.robot.mass,
                f_max: world.robot.f_max,
                v_max: world.robot.v_max,
            },
            operators: vec!["!", "&", "|", "X", "F", "U"],
        }
    }

    fn rect(&self, id: usize, e: &EnvState) -> Rect {
        Rect::from_center(e.bodies[id].center, self.bodies[id].half_extents)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ManipClass {
    FreelyMovable,
    ConstraintOriented,
    TemporarilyFixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ManipStatus {
    pub class: ManipClass,
    /// Faces the robot may push from; exactly the faces whose mRegion is free.
    pub allowed: FaceSet,
    pub declared: FaceSet,
}

impl ManipStatus {
    fn classify(declared: FaceSet, free: FaceSet) -> ManipStatus {
        let class = if free.is_empty() {
            ManipClass::TemporarilyFixed
        } else if free == declared {
            ManipClass::FreelyMovable
        } else {
            ManipClass::ConstraintOriented
        };
        ManipStatus {
            class,
            allowed: free,
            declared,
        }
    }
}

/// Manipulation status of every movable body for one environment state.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InstKnowledge {
    statuses: BTreeMap<usize, ManipStatus>,
}

impl InstKnowledge {
    pub fn status(&self, body: usize) -> Option<&ManipStatus> {
        self.statuses.get(&body)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &ManipStatus)> {
        self.statuses.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.statuses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.statuses.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KnowledgeError {
    #[error("environment has {got} bodies but the knowledge base knows {known}")]
    UnknownBody { got: usize, known: usize },
    #[error("start position is not in free space: {0}")]
    Start(#[from] LocateError),
}

/// Whether the rectangle lies in the workspace and clear of every body other
/// than `owner`.
fn region_is_free(k: &AbstractKnowledge, e: &EnvState, owner: usize, m: &Rect) -> bool {
    if !k.bounds.contains_rect(m, 1e-9) {
        return false;
    }
    (0..k.bodies.len())
        .filter(|&j| j != owner)
        .all(|j| k.rect(j, e).overlap_area(m) <= OCCUPANCY_TOL)
}

pub fn infer_initial(k: &AbstractKnowledge, e: &EnvState) -> Result<InstKnowledge, KnowledgeError> {
    if e.bodies.len() != k.bodies.len() {
        return Err(KnowledgeError::UnknownBody {
            got: e.bodies.len(),
            known: k.bodies.len(),
        });
    }
    let mut statuses = BTreeMap::new();
    for (i, b) in k.bodies.iter().enumerate() {
        if b.kind == BodyKind::Fixed {
            continue;
        }
        let rect = k.rect(i, e);
        let mut declared = FaceSet::EMPTY;
        let mut free = FaceSet::EMPTY;
        for &(face, depth) in &b.mregions {
            declared.insert(face);
            if region_is_free(k, e, i, &rect.extrude(face, depth)) {
                free.insert(face);
            }
        }
        statuses.insert(i, ManipStatus::classify(declared, free));
    }
    Ok(InstKnowledge { statuses })
}

/// Recomputes κ for a propagated state. Every status is derived afresh from
/// the new poses, so classes can change in either direction.
pub fn inference(k: &AbstractKnowledge, e_new: &EnvState, prev: &InstKnowledge) -> InstKnowledge {
    let next = infer_initial(k, e_new).expect("propagated state keeps the body list");
    debug_assert!(next.statuses.keys().eq(prev.statuses.keys()));
    next
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NonvalidReason {
    /// No cell of the region is reachable from the start through free space.
    Enclosed,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct NonvalidSet(BTreeMap<PropId, NonvalidReason>);

impl NonvalidSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, p: PropId, why: NonvalidReason) {
        assert_ne!(
            p,
            PropId::FREE,
            "the free-space proposition is always valid"
        );
        self.0.insert(p, why);
    }

    pub fn contains(&self, p: PropId) -> bool {
        self.0.contains_key(&p)
    }

    pub fn iter(&self) -> impl Iterator<Item = (PropId, NonvalidReason)> + '_ {
        self.0.iter().map(|(p, r)| (*p, *r))
    }

    pub fn props(&self) -> impl Iterator<Item = PropId> + '_ {
        self.0.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<PropId> for NonvalidSet {
    fn from_iter<I: IntoIterator<Item = PropId>>(it: I) -> Self {
        let mut s = NonvalidSet::new();
        for p in it {
            s.insert(p, NonvalidReason::Enclosed);
        }
        s
    }
}

/// Propositions whose regions cannot be reached from `start` when only fixed
/// bodies obstruct. Movable bodies are ignored since they can be pushed away.
pub fn feasibility(
    props: &PropTable,
    d: &Decomposition,
    start: Vec2,
) -> Result<NonvalidSet, KnowledgeError> {
    let (cell, _) = d.locate(start)?;
    let seen = d.reachable_from(cell);
    let mut reachable = vec![false; props.len()];
    for (c, cell) in d.cells().iter().enumerate() {
        if seen[c] {
            if let Some(r) = reachable.get_mut(cell.label.index()) {
                *r = true;
            }
        }
    }
    let mut out = NonvalidSet::new();
    for p in props.declared() {
        if !reachable[p.index()] {
            out.insert(p, NonvalidReason::Enclosed);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::{decompose, Workspace};
    use crate::physics::{
        propagate, BodySpec, BodyState, Control, PhysicsParams, RobotSpec, RobotState,
    };

    fn wall(name: &str) -> BodySpec {
        BodySpec {
            name: name.into(),
            kind: BodyKind::Fixed,
            half_extents: Vec2::ZERO,
            mass: 1.0,
            friction: 0.0,
            mregion_faces: FaceSet::EMPTY,
        }
    }

    fn boxy(name: &str, hx: f64, hy: f64) -> BodySpec {
        BodySpec {
            name: name.into(),
            kind: BodyKind::Movable,
            half_extents: Vec2::new(hx, hy),
            mass: 1.0,
            friction: 0.3,
            mregion_faces: FaceSet::ALL,
        }
    }

    /// Builds a world from `(spec, rect)` pairs; a spec's half extents are
    /// taken from its rectangle.
    fn world(bodies: Vec<(BodySpec, Rect)>, robot: Vec2) -> (World, EnvState) {
        let mut specs = Vec::new();
        let mut states = Vec::new();
        for (mut s, r) in bodies {
            s.half_extents = r.half_extents();
            specs.push(s);
            states.push(BodyState {
                center: r.center(),
                vel: Vec2::ZERO,
            });
        }
        let w = World {
            bounds: Rect::new(0.0, 0.0, 10.0, 10.0),
            bodies: specs,
            robot: RobotSpec {
                radius: 0.2,
                mass: 1.0,
                f_max: 10.0,
                v_max: 2.0,
            },
            params: PhysicsParams::default(),
        };
        let e = EnvState {
            bodies: states,
            robot: RobotState {
                p: robot,
                ..Default::default()
            },
            step: 0,
        };
        (w, e)
    }

    fn faces(fs: &[Face]) -> FaceSet {
        fs.iter().copied().collect()
    }

    #[test]
    fn isolated_box_is_freely_movable() {
        let (w, e) = world(
            vec![(boxy("b", 0.0, 0.0), Rect::new(4.0, 4.0, 5.0, 5.0))],
            Vec2::new(1.0, 1.0),
        );
        let k = AbstractKnowledge::from_world(&w);
        let s = *infer_initial(&k, &e).unwrap().status(0).unwrap();
        assert_eq!(s.class, ManipClass::FreelyMovable);
        assert_eq!(s.allowed, FaceSet::ALL);
    }

    #[test]
    fn box_wedged_between_walls_is_pushed_along_y_only() {
        let (w, e) = world(
            vec![
                (wall("l"), Rect::new(0.0, 4.0, 4.0, 5.0)),
                (wall("r"), Rect::new(5.0, 4.0, 10.0, 5.0)),
                (boxy("door", 0.0, 0.0), Rect::new(4.0, 4.05, 5.0, 4.95)),
            ],
            Vec2::new(1.0, 1.0),
        );
        let k = AbstractKnowledge::from_world(&w);
        let s = *infer_initial(&k, &e).unwrap().status(2).unwrap();
        assert_eq!(s.class, ManipClass::ConstraintOriented);
        assert_eq!(s.allowed, faces(&[Face::PosY, Face::NegY]));
    }

    #[test]
    fn enclosed_box_is_temporarily_fixed() {
        let (w, e) = world(
            vec![
                (wall("l"), Rect::new(3.0, 3.0, 4.0, 6.0)),
                (wall("r"), Rect::new(5.0, 3.0, 6.0, 6.0)),
                (wall("b"), Rect::new(4.0, 3.0, 5.0, 4.0)),
                (boxy("t", 0.0, 0.0), Rect::new(4.0, 5.0, 5.0, 5.5)),
                (boxy("in", 0.0, 0.0), Rect::new(4.0, 4.0, 5.0, 5.0)),
            ],
            Vec2::new(1.0, 1.0),
        );
        let k = AbstractKnowledge::from_world(&w);
        let kappa = infer_initial(&k, &e).unwrap();
        assert_eq!(kappa.status(4).unwrap().class, ManipClass::TemporarilyFixed);
        assert!(kappa.status(4).unwrap().allowed.is_empty());
        // the lid itself can still be pushed up or sideways
        assert_eq!(
            kappa.status(3).unwrap().class,
            ManipClass::ConstraintOriented
        );
        assert_eq!(kappa.len(), 2);
    }

    #[test]
    fn mismatched_body_list_is_rejected() {
        let (w, mut e) = world(
            vec![(boxy("b", 0.0, 0.0), Rect::new(4.0, 4.0, 5.0, 5.0))],
            Vec2::new(1.0, 1.0),
        );
        let k = AbstractKnowledge::from_world(&w);
        e.bodies.push(BodyState::default());
        assert!(matches!(
            infer_initial(&k, &e),
            Err(KnowledgeError::UnknownBody { .. })
        ));
    }

    #[test]
    fn box_pushed_out_of_the_gap_becomes_freely_movable() {
        let (w, mut e) = world(
            vec![
                (wall("l"), Rect::new(0.0, 4.0, 4.0, 5.0)),
                (wall("r"), Rect::new(5.0, 4.0, 10.0, 5.0)),
                (boxy("door", 0.0, 0.0), Rect::new(4.0, 4.05, 5.0, 4.95)),
            ],
            Vec2::new(4.5, 3.5),
        );
        let k = AbstractKnowledge::from_world(&w);
        let mut kappa = infer_initial(&k, &e).unwrap();
        assert_eq!(
            kappa.status(2).unwrap().class,
            ManipClass::ConstraintOriented
        );
        for _ in 0..200 {
            let (next, _) = propagate(&w, &e, Control::new(0.0, 4.0), 0.05).unwrap();
            e = next;
            kappa = inference(&k, &e, &kappa);
            if kappa.status(2).unwrap().class == ManipClass::FreelyMovable {
                break;
            }
        }
        assert_eq!(kappa.status(2).unwrap().class, ManipClass::FreelyMovable);
        assert!(e.bodies[2].center.y > 5.0);
    }

    #[test]
    fn unchanged_state_gives_identical_knowledge() {
        let (w, e) = world(
            vec![(boxy("b", 0.0, 0.0), Rect::new(4.0, 4.0, 5.0, 5.0))],
            Vec2::new(1.0, 1.0),
        );
        let k = AbstractKnowledge::from_world(&w);
        let kappa = infer_initial(&k, &e).unwrap();
        let (next, report) = propagate(&w, &e, Control::default(), 0.05).unwrap();
        assert!(report.moved.is_empty());
        assert_eq!(inference(&k, &next, &kappa), kappa);
        assert_eq!(infer_initial(&k, &e).unwrap(), kappa);
    }

    #[test]
    fn box_moved_under_another_blocks_its_lower_face() {
        let (w, mut e) = world(
            vec![
                (boxy("upper", 0.0, 0.0), Rect::new(4.0, 5.0, 5.0, 6.0)),
                (boxy("lower", 0.0, 0.0), Rect::new(1.0, 4.3, 2.0, 4.7)),
            ],
            Vec2::new(0.5, 4.5),
        );
        let k = AbstractKnowledge::from_world(&w);
        let kappa = infer_initial(&k, &e).unwrap();
        assert!(kappa.status(0).unwrap().allowed.contains(Face::NegY));
        // slide the lower box right, under the upper one
        e.bodies[1].center = Vec2::new(4.5, 4.5);
        let kappa = inference(&k, &e, &kappa);
        let upper = kappa.status(0).unwrap();
        assert!(!upper.allowed.contains(Face::NegY));
        assert_eq!(upper.class, ManipClass::ConstraintOriented);
    }

    fn rooms() -> (PropTable, Workspace) {
        let props = PropTable::with_names(["p1", "p2", "p3"]).unwrap();
        let w = Workspace {
            bounds: Rect::new(0.0, 0.0, 10.0, 10.0),
            regions: vec![
                (PropId(1), Rect::new(1.0, 1.0, 2.0, 2.0)),
                (PropId(2), Rect::new(6.0, 1.0, 7.0, 2.0)),
                (PropId(3), Rect::new(7.0, 7.0, 8.0, 8.0)),
            ],
            // a closed box of walls around p3
            fixed: vec![
                Rect::new(6.0, 6.0, 9.0, 6.5),
                Rect::new(6.0, 8.5, 9.0, 9.0),
                Rect::new(6.0, 6.5, 6.5, 8.5),
                Rect::new(8.5, 6.5, 9.0, 8.5),
            ],
        };
        (props, w)
    }

    #[test]
    fn walled_in_region_is_nonvalid() {
        let (props, w) = rooms();
        let d = decompose(&w, 0.5).unwrap();
        let m = feasibility(&props, &d, Vec2::new(0.5, 0.5)).unwrap();
        assert_eq!(m.props().collect::<Vec<_>>(), vec![PropId(3)]);
        assert_eq!(m.iter().next().unwrap().1, NonvalidReason::Enclosed);
    }

    #[test]
    fn open_workspace_has_no_nonvalid_regions() {
        let (props, mut w) = rooms();
        w.fixed.clear();
        let d = decompose(&w, 0.5).unwrap();
        assert!(feasibility(&props, &d, Vec2::new(0.5, 0.5))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn movable_bodies_do_not_block_reachability() {
        // p3's enclosure has a one-cell doorway that a box would plug; the
        // box is not part of the decomposition, so p3 stays valid
        let (props, mut w) = rooms();
        w.fixed[2] = Rect::new(6.0, 6.5, 6.5, 7.0);
        w.fixed.push(Rect::new(6.0, 8.0, 6.5, 8.5));
        let d = decompose(&w, 0.5).unwrap();
        assert!(feasibility(&props, &d, Vec2::new(0.5, 0.5))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn start_inside_a_wall_is_an_error() {
        let (props, w) = rooms();
        let d = decompose(&w, 0.5).unwrap();
        assert!(feasibility(&props, &d, Vec2::new(6.2, 7.0)).is_err());
    }
}
