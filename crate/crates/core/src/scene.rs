//! Line-oriented scene files.
//!
//! ```text
//! cosafe-tamp/1
//! workspace 0,0,10,8
//! robot x=1 y=1 radius=0.2 mass=1 fmax=10 vmax=2
//! body id=wall kind=fixed rect=0,3.5,8,4.5
//! body id=crate kind=movable rect=1.6,3.6,2.4,4.4 mass=1 mu=0.3 mregions=+y,-y
//! region name=p1 rect=1,1,2,2
//! config t_max_s=30
//! ```
//!
//! Blank lines and `#` comments are ignored. Movable bodies without a
//! `mregions` key get a manipulation region on every face.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::decomposition::{DecompError, Workspace};
use crate::geometry::{Face, FaceSet, Rect, Vec2};
use crate::ltl::{PropId, PropTable};
use crate::physics::{
    BodyKind, BodySpec, BodyState, EnvState, PhysicsParams, RobotSpec, RobotState, World,
};
use crate::planner::PlannerConfig;
use crate::FORMAT_HEADER;

#[derive(Debug, Error, PartialEq)]
pub enum SceneError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("invalid scene: {0}")]
    Invalid(String),
    #[error(transparent)]
    Workspace(#[from] DecompError),
    #[error("cannot read scene: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub world: World,
    /// Initial footprints exactly as written; `init` is derived from them.
    pub body_rects: Vec<Rect>,
    pub init: EnvState,
    pub props: PropTable,
    pub regions: Vec<(PropId, Rect)>,
    pub planner: PlannerConfig,
}

/// Keys accepted in `config` lines.
pub const CONFIG_KEYS: &[&str] = &[
    "t_max_s",
    "dt_s",
    "n_substeps",
    "n_min",
    "n_max",
    "resolution_m",
    "seed",
    "k_lead",
    "max_failures",
    "gravity",
    "v_body_max",
];

struct Fields<'a> {
    line: usize,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Fields<'a> {
    fn parse(line: usize, tokens: &[&'a str]) -> Result<Self, SceneError> {
        let mut pairs: Vec<(&str, &str)> = Vec::new();
        for t in tokens {
            let (k, v) = t
                .split_once('=')
                .ok_or_else(|| syntax(line, format!("expected key=value, got `{t}`")))?;
            if pairs.iter().any(|(q, _)| *q == k) {
                return Err(syntax(line, format!("key `{k}` given twice")));
            }
            pairs.push((k, v));
        }
        Ok(Fields { line, pairs })
    }

    fn allow(&self, keys: &[&str]) -> Result<(), SceneError> {
        match self.pairs.iter().find(|(k, _)| !keys.contains(k)) {
            Some((k, _)) => Err(syntax(self.line, format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }

    fn opt(&self, key: &str) -> Option<&'a str> {
        self.pairs.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn req(&self, key: &str) -> Result<&'a str, SceneError> {
        self.opt(key)
            .ok_or_else(|| syntax(self.line, format!("missing key `{key}`")))
    }

    fn num(&self, key: &str) -> Result<f64, SceneError> {
        number(self.line, key, self.req(key)?)
    }
}

fn syntax(line: usize, msg: impl Into<String>) -> SceneError {
    SceneError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn number(line: usize, key: &str, v: &str) -> Result<f64, SceneError> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(syntax(
            line,
            format!("`{key}` must be a finite number, got `{v}`"),
        )),
    }
}

fn rect(line: usize, v: &str) -> Result<Rect, SceneError> {
    let parts: Vec<&str> = v.split(',').collect();
    if parts.len() != 4 {
        return Err(syntax(
            line,
            format!("rectangle needs x0,y0,x1,y1, got `{v}`"),
        ));
    }
    let mut n = [0.0; 4];
    for (slot, p) in n.iter_mut().zip(&parts) {
        *slot = number(line, "rect", p)?;
    }
    if n[0] >= n[2] || n[1] >= n[3] {
        return Err(syntax(
            line,
            format!("rectangle `{v}` is empty or inverted"),
        ));
    }
    Ok(Rect::new(n[0], n[1], n[2], n[3]))
}

fn faces(line: usize, v: &str) -> Result<FaceSet, SceneError> {
    if v == "none" {
        return Ok(FaceSet::EMPTY);
    }
    let mut out = FaceSet::EMPTY;
    for part in v.split(',') {
        let f = Face::parse(part).ok_or_else(|| syntax(line, format!("unknown face `{part}`")))?;
        out.insert(f);
    }
    Ok(out)
}

fn positive(line: usize, key: &str, x: f64) -> Result<f64, SceneError> {
    if x > 0.0 {
        Ok(x)
    } else {
        Err(syntax(line, format!("`{key}` must be positive")))
    }
}

fn int<T: std::str::FromStr>(line: usize, key: &str, v: &str) -> Result<T, SceneError> {
    v.parse().map_err(|_| {
        syntax(
            line,
            format!("`{key}` must be a non-negative integer, got `{v}`"),
        )
    })
}

impl Scene {
    pub fn load(path: &Path) -> Result<Scene, SceneError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SceneError::Io(format!("{}: {e}", path.display())))?;
        Scene::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Scene, SceneError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());
        match lines.next() {
            Some((_, h)) if h == FORMAT_HEADER => {}
            Some((n, h)) => {
                return Err(syntax(
                    n,
                    format!("expected header `{FORMAT_HEADER}`, got `{h}`"),
                ))
            }
            None => return Err(syntax(1, "empty scene file")),
        }

        let mut bounds = None;
        let mut robot: Option<(RobotSpec, Vec2)> = None;
        let mut bodies: Vec<BodySpec> = Vec::new();
        let mut states: Vec<BodyState> = Vec::new();
        let mut body_rects = Vec::new();
        let mut props = PropTable::new();
        let mut regions = Vec::new();
        let mut params = PhysicsParams::default();
        let mut planner = PlannerConfig::default();

        for (n, l) in lines {
            let tokens: Vec<&str> = l.split_whitespace().collect();
            match tokens[0] {
                "workspace" => {
                    if bounds.is_some() || tokens.len() != 2 {
                        return Err(syntax(n, "expected a single `workspace x0,y0,x1,y1` line"));
                    }
                    bounds = Some(rect(n, tokens[1])?);
                }
                "robot" => {
                    if robot.is_some() {
                        return Err(syntax(n, "robot given twice"));
                    }
                    let f = Fields::parse(n, &tokens[1..])?;
                    f.allow(&["x", "y", "radius", "mass", "fmax", "vmax"])?;
                    let spec = RobotSpec {
                        radius: positive(n, "radius", f.num("radius")?)?,
                        mass: positive(n, "mass", f.num("mass")?)?,
                        f_max: positive(n, "fmax", f.num("fmax")?)?,
                        v_max: positive(n, "vmax", f.num("vmax")?)?,
                    };
                    robot = Some((spec, Vec2::new(f.num("x")?, f.num("y")?)));
                }
                "body" => {
                    let f = Fields::parse(n, &tokens[1..])?;
                    let name = f.req("id")?.to_string();
                    if bodies.iter().any(|b| b.name == name) {
                        return Err(syntax(n, format!("body `{name}` declared twice")));
                    }
                    let r = rect(n, f.req("rect")?)?;
                    let spec = match f.req("kind")? {
                        "fixed" => {
                            f.allow(&["id", "kind", "rect"])?;
                            BodySpec {
                                name,
                                kind: BodyKind::Fixed,
                                half_extents: r.half_extents(),
                                mass: 1.0,
                                friction: 0.0,
                                mregion_faces: FaceSet::EMPTY,
                            }
                        }
                        "movable" => {
                            f.allow(&["id", "kind", "rect", "mass", "mu", "mregions"])?;
                            let mu = f.num("mu")?;
                            if mu < 0.0 {
                                return Err(syntax(n, "`mu` must not be negative"));
                            }
                            BodySpec {
                                name,
                                kind: BodyKind::Movable,
                                half_extents: r.half_extents(),
                                mass: positive(n, "mass", f.num("mass")?)?,
                                friction: mu,
                                mregion_faces: match f.opt("mregions") {
                                    Some(v) => faces(n, v)?,
                                    None => FaceSet::ALL,
                                },
                            }
                        }
                        other => return Err(syntax(n, format!("unknown body kind `{other}`"))),
                    };
                    bodies.push(spec);
                    body_rects.push(r);
                    states.push(BodyState {
                        center: r.center(),
                        vel: Vec2::ZERO,
                    });
                }
                "region" => {
                    let f = Fields::parse(n, &tokens[1..])?;
                    f.allow(&["name", "rect"])?;
                    let id = props
                        .declare(f.req("name")?)
                        .map_err(|e| syntax(n, e.to_string()))?;
                    regions.push((id, rect(n, f.req("rect")?)?));
                }
                "config" => {
                    for (k, v) in Fields::parse(n, &tokens[1..])?.pairs {
                        apply_config(n, k, v, &mut params, &mut planner)?;
                    }
                }
                other => return Err(syntax(n, format!("unknown section `{other}`"))),
            }
        }

        let bounds = bounds.ok_or_else(|| SceneError::Invalid("missing workspace line".into()))?;
        let (robot, start) =
            robot.ok_or_else(|| SceneError::Invalid("missing robot line".into()))?;
        let scene = Scene {
            world: World {
                bounds,
                bodies,
                robot,
                params,
            },
            body_rects,
            init: EnvState {
                bodies: states,
                robot: RobotState {
                    p: start,
                    ..Default::default()
                },
                step: 0,
            },
            props,
            regions,
            planner,
        };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        self.workspace().validate()?;
        let w = &self.world;
        let invalid = |m: String| Err(SceneError::Invalid(m));
        let rects: Vec<Rect> = (0..w.bodies.len())
            .map(|i| w.body_rect(i, &self.init))
            .collect();
        for (i, r) in rects.iter().enumerate() {
            if !w.bounds.contains_rect(r, 0.0) {
                return invalid(format!("body `{}` leaves the workspace", w.bodies[i].name));
            }
            for (j, q) in rects.iter().enumerate().skip(i + 1) {
                if r.overlap_area(q) > 0.0 {
                    return invalid(format!(
                        "bodies `{}` and `{}` overlap",
                        w.bodies[i].name, w.bodies[j].name
                    ));
                }
            }
        }
        let p = self.init.robot.p;
        let rad = w.robot.radius;
        if !w
            .bounds
            .contains_rect(&Rect::new(p.x - rad, p.y - rad, p.x + rad, p.y + rad), 0.0)
        {
            return invalid("robot leaves the workspace".into());
        }
        if let Some(i) = rects.iter().position(|r| r.disc_penetration(p, rad) > 0.0) {
            return invalid(format!("robot overlaps body `{}`", w.bodies[i].name));
        }
        let pp = &w.params;
        if !(pp.dt > 0.0) || pp.n_substeps == 0 || !(pp.gravity >= 0.0) || !(pp.v_body_max > 0.0) {
            return invalid("physics parameters out of range".into());
        }
        let c = &self.planner;
        if c.n_min == 0 || c.n_min > c.n_max {
            return invalid("need 1 <= n_min <= n_max".into());
        }
        if c.resolution_m.is_some_and(|r| !(r > 0.0)) || !(c.t_max_s >= 0.0) || c.k_lead == 0 {
            return invalid("planner parameters out of range".into());
        }
        Ok(())
    }

    pub fn workspace(&self) -> Workspace {
        Workspace {
            bounds: self.world.bounds,
            regions: self.regions.clone(),
            fixed: self.fixed_rects(),
        }
    }

    pub fn fixed_rects(&self) -> Vec<Rect> {
        self.world.fixed_rects(&self.init).collect()
    }

    pub fn start(&self) -> Vec2 {
        self.init.robot.p
    }

    pub fn region(&self, p: PropId) -> Option<Rect> {
        self.regions.iter().find(|(q, _)| *q == p).map(|(_, r)| *r)
    }

    pub fn to_text(&self) -> String {
        let w = &self.world;
        let mut s = String::new();
        let _ = writeln!(s, "{FORMAT_HEADER}");
        let _ = writeln!(s, "workspace {}", w.bounds);
        let r = &w.robot;
        let p = self.init.robot.p;
        let _ = writeln!(
            s,
            "robot x={} y={} radius={} mass={} fmax={} vmax={}",
            p.x, p.y, r.radius, r.mass, r.f_max, r.v_max
        );
        for (b, rect) in w.bodies.iter().zip(&self.body_rects) {
            match b.kind {
                BodyKind::Fixed => {
                    let _ = writeln!(s, "body id={} kind=fixed rect={rect}", b.name);
                }
                BodyKind::Movable => {
                    let m = if b.mregion_faces.is_empty() {
                        "none".to_string()
                    } else {
                        b.mregion_faces.to_string()
                    };
                    let _ = writeln!(
                        s,
                        "body id={} kind=movable rect={rect} mass={} mu={} mregions={m}",
                        b.name, b.mass, b.friction
                    );
                }
            }
        }
        for (id, rect) in &self.regions {
            let _ = writeln!(s, "region name={} rect={rect}", self.props.name(*id));
        }
        for (k, v) in config_entries(&w.params, &self.planner) {
            let _ = writeln!(s, "config {k}={v}");
        }
        s
    }
}

fn apply_config(
    line: usize,
    key: &str,
    v: &str,
    params: &mut PhysicsParams,
    planner: &mut PlannerConfig,
) -> Result<(), SceneError> {
    match key {
        "t_max_s" => planner.t_max_s = number(line, key, v)?,
        "dt_s" => params.dt = number(line, key, v)?,
        "n_substeps" => params.n_substeps = int(line, key, v)?,
        "n_min" => planner.n_min = int(line, key, v)?,
        "n_max" => planner.n_max = int(line, key, v)?,
        "resolution_m" => planner.resolution_m = Some(number(line, key, v)?),
        "seed" => planner.seed = int(line, key, v)?,
        "k_lead" => planner.k_lead = int(line, key, v)?,
        "max_failures" => planner.max_failures = int(line, key, v)?,
        "gravity" => params.gravity = number(line, key, v)?,
        "v_body_max" => params.v_body_max = number(line, key, v)?,
        _ => return Err(syntax(line, format!("unknown config key `{key}`"))),
    }
    Ok(())
}

/// Config values that differ from the defaults, in `CONFIG_KEYS` order.
fn config_entries(params: &PhysicsParams, planner: &PlannerConfig) -> Vec<(&'static str, String)> {
    let dp = PhysicsParams::default();
    let dc = PlannerConfig::default();
    let mut out = Vec::new();
    let mut put = |k: &'static str, differs: bool, v: String| {
        if differs {
            out.push((k, v));
        }
    };
    put(
        "t_max_s",
        planner.t_max_s != dc.t_max_s,
        planner.t_max_s.to_string(),
    );
    put("dt_s", params.dt != dp.dt, params.dt.to_string());
    put(
        "n_substeps",
        params.n_substeps != dp.n_substeps,
        params.n_substeps.to_string(),
    );
    put(
        "n_min",
        planner.n_min != dc.n_min,
        planner.n_min.to_string(),
    );
    put(
        "n_max",
        planner.n_max != dc.n_max,
        planner.n_max.to_string(),
    );
    if let Some(r) = planner.resolution_m {
        put("resolution_m", true, r.to_string());
    }
    put("seed", planner.seed != dc.seed, planner.seed.to_string());
    put(
        "k_lead",
        planner.k_lead != dc.k_lead,
        planner.k_lead.to_string(),
    );
    put(
        "max_failures",
        planner.max_failures != dc.max_failures,
        planner.max_failures.to_string(),
    );
    put(
        "gravity",
        params.gravity != dp.gravity,
        params.gravity.to_string(),
    );
    put(
        "v_body_max",
        params.v_body_max != dp.v_body_max,
        params.v_body_max.to_string(),
    );
    out
}
