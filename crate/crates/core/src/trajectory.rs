//! Trajectory files: the seed and settings a plan was made with, followed by
//! one line per control step. Each step carries a short digest of the state it
//! produces, so a replay can tell exactly where it diverges.
//!
//! ```text
//! cosafe-tamp/1
//! trajectory
//! seed 7
//! mode knowledge
//! physics dt_s=0.05 n_substeps=10 gravity=9.81 v_body_max=2
//! start 1f2e3d4c5b6a7988
//! step 3.5 -1.25 0.05 0a1b2c3d4e5f6071
//! ```

use std::fmt::Write as _;
use std::rc::Rc;

use thiserror::Error;

use crate::decomposition::Decomposition;
use crate::knowledge::{infer_initial, inference, AbstractKnowledge};
use crate::ltl::DiscreteTrace;
use crate::physics::{propagate, validity_check, Control, EnvState, PhysicsError, PhysicsParams};
use crate::planner::Trajectory;
use crate::scene::Scene;
use crate::FORMAT_HEADER;

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryFile {
    pub seed: u64,
    pub knowledge: bool,
    pub params: PhysicsParams,
    pub start: String,
    pub steps: Vec<Step>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub control: Control,
    pub dt: f64,
    pub fingerprint: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum TrajectoryError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("start state does not match the scene")]
    StartMismatch,
    #[error("replay diverges at step {step}")]
    Divergence { step: usize },
    #[error(transparent)]
    Physics(#[from] PhysicsError),
}

/// Outcome of re-propagating a trajectory file through the scene.
#[derive(Debug, Clone, PartialEq)]
pub struct Replay {
    pub states: Vec<EnvState>,
    pub trace: Option<DiscreteTrace>,
    /// First step whose state fails the validity check, if any.
    pub invalid_step: Option<usize>,
}

impl TrajectoryFile {
    pub fn from_plan(traj: &Trajectory, seed: u64, knowledge: bool, params: PhysicsParams) -> Self {
        TrajectoryFile {
            seed,
            knowledge,
            params,
            start: traj.states[0].fingerprint(),
            steps: traj
                .controls
                .iter()
                .zip(&traj.states[1..])
                .map(|((u, dt), s)| Step {
                    control: *u,
                    dt: *dt,
                    fingerprint: s.fingerprint(),
                })
                .collect(),
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let p = &self.params;
        let _ = writeln!(s, "{FORMAT_HEADER}\ntrajectory\nseed {}", self.seed);
        let _ = writeln!(
            s,
            "mode {}",
            if self.knowledge {
                "knowledge"
            } else {
                "no-knowledge"
            }
        );
        let _ = writeln!(
            s,
            "physics dt_s={} n_substeps={} gravity={} v_body_max={}",
            p.dt, p.n_substeps, p.gravity, p.v_body_max
        );
        let _ = writeln!(s, "start {}", self.start);
        for st in &self.steps {
            let _ = writeln!(
                s,
                "step {} {} {} {}",
                st.control.u.x, st.control.u.y, st.dt, st.fingerprint
            );
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self, TrajectoryError> {
        let err = |line: usize, msg: &str| TrajectoryError::Syntax {
            line,
            msg: msg.to_string(),
        };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let mut expect = |word: &str| -> Result<(usize, Vec<String>), TrajectoryError> {
            let (n, l) = lines
                .next()
                .ok_or_else(|| err(0, &format!("missing `{word}` line")))?;
            let mut toks = l.split_whitespace().map(str::to_string);
            if toks.next().as_deref() != Some(word) {
                return Err(err(n, &format!("expected `{word}`")));
            }
            Ok((n, toks.collect()))
        };
        let (n, rest) = expect(FORMAT_HEADER)?;
        if !rest.is_empty() {
            return Err(err(n, "unexpected text after header"));
        }
        expect("trajectory")?;
        let (n, rest) = expect("seed")?;
        let seed = match rest.as_slice() {
            [v] => v.parse().map_err(|_| err(n, "bad seed"))?,
            _ => return Err(err(n, "bad seed")),
        };
        let (n, rest) = expect("mode")?;
        let knowledge = match rest.as_slice() {
            [m] if m == "knowledge" => true,
            [m] if m == "no-knowledge" => false,
            _ => return Err(err(n, "mode must be `knowledge` or `no-knowledge`")),
        };
        let (n, rest) = expect("physics")?;
        let mut params = PhysicsParams::default();
        let mut seen = 0;
        for kv in &rest {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| err(n, "expected key=value"))?;
            let num = || {
                v.parse::<f64>()
                    .map_err(|_| err(n, &format!("bad value for `{k}`")))
            };
            match k {
                "dt_s" => params.dt = num()?,
                "n_substeps" => {
                    params.n_substeps = v.parse().map_err(|_| err(n, "bad n_substeps"))?
                }
                "gravity" => params.gravity = num()?,
                "v_body_max" => params.v_body_max = num()?,
                _ => return Err(err(n, &format!("unknown key `{k}`"))),
            }
            seen += 1;
        }
        if seen != 4 {
            return Err(err(
                n,
                "physics line needs dt_s, n_substeps, gravity and v_body_max",
            ));
        }
        let (n, rest) = expect("start")?;
        let start = match rest.as_slice() {
            [fp] => fp.clone(),
            _ => return Err(err(n, "bad start line")),
        };
        let mut steps = Vec::new();
        for (n, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            let [tag, ux, uy, dt, fp] = toks.as_slice() else {
                return Err(err(n, "expected `step ux uy dt fingerprint`"));
            };
            if *tag != "step" {
                return Err(err(n, "expected `step`"));
            }
            let num = |v: &str| match v.parse::<f64>() {
                Ok(x) if x.is_finite() => Ok(x),
                _ => Err(err(n, &format!("bad number `{v}`"))),
            };
            steps.push(Step {
                control: Control::new(num(ux)?, num(uy)?),
                dt: num(dt)?,
                fingerprint: fp.to_string(),
            });
        }
        Ok(TrajectoryFile {
            seed,
            knowledge,
            params,
            start,
            steps,
        })
    }

    /// Re-propagates every step from the scene's start state, checking each
    /// state digest and the validity of every step.
    pub fn replay(&self, scene: &Scene, d: &Decomposition) -> Result<Replay, TrajectoryError> {
        let mut world = scene.world.clone();
        world.params = self.params;
        if scene.init.fingerprint() != self.start {
            return Err(TrajectoryError::StartMismatch);
        }
        let k = AbstractKnowledge::from_world(&world);
        let kappa0 =
            Rc::new(infer_initial(&k, &scene.init).map_err(|_| TrajectoryError::StartMismatch)?);
        let mut kappa = kappa0.clone();
        let mut states = vec![scene.init.clone()];
        let mut invalid_step = None;
        for (i, st) in self.steps.iter().enumerate() {
            let cur = states.last().expect("start state present");
            let (next, report) = propagate(&world, cur, st.control, st.dt)?;
            if next.fingerprint() != st.fingerprint {
                return Err(TrajectoryError::Divergence { step: i + 1 });
            }
            if invalid_step.is_none() && !validity_check(&world, &next, &kappa, &report) {
                invalid_step = Some(i + 1);
            }
            if self.knowledge && !report.moved.is_empty() {
                kappa = Rc::new(inference(&k, &next, &kappa));
            }
            states.push(next);
        }
        let trace = Trajectory::trace_of(d, &states);
        Ok(Replay {
            states,
            trace,
            invalid_step,
        })
    }
}
