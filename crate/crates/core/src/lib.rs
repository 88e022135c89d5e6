//! Co-safe LTL task and motion planning among pushable obstacles.
//!
//! The crate is split along the planning pipeline:
//!
//! - [`ltl`]: formula parsing, positive normal form, finite-trace semantics and
//!   the automaton used to track task progress.
//! - [`knowledge`]: abstract and instantiated manipulation knowledge, region
//!   feasibility and formula simplification.
//! - [`physics`]: the planar push world (propagator and validity checker).
//! - [`decomposition`]: region-conforming cell decomposition of the free workspace.
//! - [`planner`]: the lead-guided hybrid planner.
//! - [`scene`] and [`trajectory`]: the line-oriented file formats.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod decomposition;
pub mod geometry;
pub mod knowledge;
pub mod ltl;
pub mod physics;
pub mod planner;
pub mod scene;
pub mod trajectory;

pub use decomposition::{decompose, CellId, Decomposition, Workspace};
pub use geometry::{Face, FaceSet, Rect, Vec2};
pub use knowledge::{AbstractKnowledge, InstKnowledge, ManipClass, ManipStatus, NonvalidSet};
pub use ltl::{DiscreteTrace, Formula, Nfa, PropId, PropTable};
pub use physics::{Contact, ContactReport, Control, EnvState, World};
pub use planner::{plan, PlanOutcome, PlanResult, PlannerConfig, Trajectory};
pub use scene::{Scene, SceneError};
pub use trajectory::{TrajectoryError, TrajectoryFile};

/// Version header shared by the scene and trajectory file formats.
pub const FORMAT_HEADER: &str = "cosafe-tamp/1";
