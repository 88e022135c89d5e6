use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use cosafe_core::decomposition::DecompError;
use cosafe_core::knowledge::evaluate;
use cosafe_core::ltl::{parse_formula, to_pnf, trace_satisfies, ParseError};
use cosafe_core::planner::PlanError;
use cosafe_core::{
    decompose, plan, Decomposition, DiscreteTrace, Formula, Nfa, PlanOutcome, Scene,
    TrajectoryError, TrajectoryFile,
};

use crate::report::{Outcome, RunReport};
use crate::{svg, EXIT_DIVERGENCE, EXIT_INFEASIBLE, EXIT_REJECTED, EXIT_SOLVED, EXIT_USAGE};

/// A loaded scene together with the parsed formula (in positive normal form).
pub struct Task {
    pub scene: Scene,
    pub phi: Formula,
}

/// Renders a formula parse error with a caret under the offending column.
pub fn describe_parse_error(text: &str, e: &ParseError) -> String {
    let pad = " ".repeat(e.column().saturating_sub(1));
    format!("error: formula: {e}\n  {text}\n  {pad}^")
}

pub fn load_task(scene: &Path, formula: &str) -> Result<Task, String> {
    let scene = Scene::load(scene).map_err(|e| format!("error: scene {}: {e}", scene.display()))?;
    let parsed =
        parse_formula(formula, &scene.props).map_err(|e| describe_parse_error(formula, &e))?;
    let phi = to_pnf(&parsed).map_err(|e| format!("error: formula: {e}"))?;
    Ok(Task { scene, phi })
}

pub fn scene_decomposition(scene: &Scene) -> Result<Decomposition, DecompError> {
    let w = scene.workspace();
    let res = scene
        .planner
        .resolution_m
        .unwrap_or_else(|| w.default_resolution());
    decompose(&w, res)
}

#[derive(Debug, Clone)]
pub struct PlanOptions {
    pub seed: Option<u64>,
    pub tmax: Option<f64>,
    pub knowledge: bool,
    pub out: PathBuf,
    pub svg: Option<PathBuf>,
}

/// Plans once and reports. `Err` carries a message and exit code for failures
/// that produce no report.
pub fn run_plan(
    task: &Task,
    seed: u64,
    tmax: f64,
    knowledge: bool,
) -> Result<(RunReport, Option<TrajectoryFile>), (String, i32)> {
    let mut cfg = task.scene.planner.clone();
    cfg.seed = seed;
    cfg.t_max_s = tmax;
    cfg.knowledge = knowledge;
    let result = plan(&task.scene, &task.phi, &cfg).map_err(|e| {
        let code = match e {
            PlanError::Knowledge(_) | PlanError::Decomposition(_) | PlanError::NotCoSafe(_) => {
                EXIT_USAGE
            }
            _ => 1,
        };
        (format!("error: {e}"), code)
    })?;
    let report = RunReport::new(&task.scene, &task.phi, &result, seed, knowledge);
    let file = match &result.outcome {
        PlanOutcome::Solved(t) => Some(TrajectoryFile::from_plan(
            t,
            seed,
            knowledge,
            task.scene.world.params,
        )),
        _ => None,
    };
    Ok((report, file))
}

pub fn cmd_plan(
    scene: &Path,
    formula: &str,
    opts: &PlanOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let task = match load_task(scene, formula) {
        Ok(t) => t,
        Err(msg) => return fail(err, &msg, EXIT_USAGE),
    };
    let seed = opts.seed.unwrap_or(task.scene.planner.seed);
    let tmax = opts.tmax.unwrap_or(task.scene.planner.t_max_s);
    if !(tmax >= 0.0) {
        return fail(
            err,
            "error: --tmax must be a nonnegative number",
            EXIT_USAGE,
        );
    }
    let (report, file) = match run_plan(&task, seed, tmax, opts.knowledge) {
        Ok(r) => r,
        Err((msg, code)) => return fail(err, &msg, code),
    };

    if let Err(e) = write_artifacts(&report, file.as_ref(), opts) {
        return fail(err, &format!("error: {e}"), 1);
    }
    let _ = writeln!(out, "outcome: {}", outcome_name(report.outcome));
    if let Some(r) = &report.reason {
        let _ = writeln!(out, "reason: {r}");
    }
    let _ = writeln!(
        out,
        "psi: {}",
        report.psi.as_deref().unwrap_or("INFEASIBLE")
    );
    let _ = writeln!(
        out,
        "seed: {}  time: {:.3} s  tree: {}",
        report.seed, report.wall_time_s, report.tree_size
    );
    if report.outcome == Outcome::Solved {
        let _ = writeln!(out, "trace: {}", report.trace.join(" "));
        let _ = writeln!(out, "steps: {}", report.steps);
    }
    report.exit_code()
}

fn write_artifacts(
    report: &RunReport,
    file: Option<&TrajectoryFile>,
    opts: &PlanOptions,
) -> std::io::Result<()> {
    fs::create_dir_all(&opts.out)?;
    let json = serde_json::to_string_pretty(report).map_err(std::io::Error::other)?;
    fs::write(opts.out.join("report.json"), json + "\n")?;
    if let Some(f) = file {
        fs::write(opts.out.join("trajectory.traj"), f.to_text())?;
    }
    if let Some(path) = &opts.svg {
        fs::write(path, svg::render(report))?;
    }
    Ok(())
}

#[derive(Debug, PartialEq)]
pub enum CheckFailure {
    Replay(TrajectoryError),
    InvalidStep(usize),
    NoTrace,
    Rejected { automaton: bool, semantics: bool },
}

impl CheckFailure {
    pub fn exit_code(&self) -> i32 {
        match self {
            CheckFailure::Replay(TrajectoryError::Syntax { .. }) => EXIT_USAGE,
            CheckFailure::Replay(_) => EXIT_DIVERGENCE,
            _ => EXIT_REJECTED,
        }
    }
}

impl std::fmt::Display for CheckFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CheckFailure::Replay(e) => write!(f, "{e}"),
            CheckFailure::InvalidStep(i) => {
                write!(f, "step {i} violates the manipulation constraints")
            }
            CheckFailure::NoTrace => f.write_str("the replayed path leaves free space"),
            CheckFailure::Rejected {
                automaton,
                semantics,
            } if automaton != semantics => {
                write!(
                    f,
                    "automaton ({automaton}) and semantics ({semantics}) disagree"
                )
            }
            CheckFailure::Rejected { .. } => f.write_str("trace does not satisfy the formula"),
        }
    }
}

/// Replays `file` through the scene and checks the resulting trace against
/// `phi` with both the automaton and the direct semantics.
pub fn check_trajectory(
    scene: &Scene,
    phi: &Formula,
    file: &TrajectoryFile,
) -> Result<DiscreteTrace, CheckFailure> {
    let d = scene_decomposition(scene).map_err(|_| CheckFailure::NoTrace)?;
    let replay = file.replay(scene, &d).map_err(CheckFailure::Replay)?;
    if let Some(i) = replay.invalid_step {
        return Err(CheckFailure::InvalidStep(i));
    }
    let trace = replay.trace.ok_or(CheckFailure::NoTrace)?;
    let automaton = Nfa::build(phi, scene.props.len())
        .and_then(|n| n.accepts(&trace))
        .unwrap_or(false);
    let semantics = trace_satisfies(phi, &trace);
    if automaton && semantics {
        Ok(trace)
    } else {
        Err(CheckFailure::Rejected {
            automaton,
            semantics,
        })
    }
}

pub fn cmd_check(
    scene: &Path,
    formula: &str,
    trajectory: &Path,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let task = match load_task(scene, formula) {
        Ok(t) => t,
        Err(msg) => return fail(err, &msg, EXIT_USAGE),
    };
    let text = match fs::read_to_string(trajectory) {
        Ok(t) => t,
        Err(e) => {
            return fail(
                err,
                &format!("error: trajectory {}: {e}", trajectory.display()),
                EXIT_USAGE,
            )
        }
    };
    let file = match TrajectoryFile::parse(&text) {
        Ok(f) => f,
        Err(e) => {
            return fail(
                err,
                &format!("error: trajectory {}: {e}", trajectory.display()),
                EXIT_USAGE,
            )
        }
    };
    match check_trajectory(&task.scene, &task.phi, &file) {
        Ok(trace) => {
            let names: Vec<&str> = trace.iter().map(|p| task.scene.props.name(*p)).collect();
            let _ = writeln!(
                out,
                "ok: {} steps, trace {}",
                file.steps.len(),
                names.join(" ")
            );
            EXIT_SOLVED
        }
        Err(f) => fail(err, &format!("rejected: {f}"), f.exit_code()),
    }
}

pub fn cmd_evaluate(scene: &Path, formula: &str, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let task = match load_task(scene, formula) {
        Ok(t) => t,
        Err(msg) => return fail(err, &msg, EXIT_USAGE),
    };
    let props = &task.scene.props;
    let d = match scene_decomposition(&task.scene) {
        Ok(d) => d,
        Err(e) => return fail(err, &format!("error: {e}"), EXIT_USAGE),
    };
    let (nonvalid, psi) = match evaluate(&task.phi, props, &d, task.scene.start()) {
        Ok(r) => r,
        Err(e) => return fail(err, &format!("error: {e}"), EXIT_USAGE),
    };
    if nonvalid.is_empty() {
        let _ = writeln!(out, "nonvalid: none");
    } else {
        let names: Vec<&str> = nonvalid.props().map(|p| props.name(p)).collect();
        let _ = writeln!(out, "nonvalid: {}", names.join(" "));
    }
    match psi {
        Some(psi) => {
            if psi == task.phi {
                let _ = writeln!(out, "no simplification");
            }
            let _ = writeln!(out, "psi: {}", psi.display(props));
            EXIT_SOLVED
        }
        None => {
            let _ = writeln!(out, "psi: INFEASIBLE");
            EXIT_INFEASIBLE
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchRow {
    pub report: RunReport,
    pub trajectory: Option<TrajectoryFile>,
    /// Replay check result for solved runs; `None` otherwise.
    pub verified: Option<bool>,
}

#[derive(Debug, Clone, Default)]
pub struct BenchSummary {
    pub rows: Vec<BenchRow>,
}

impl BenchSummary {
    fn mode(&self, knowledge: bool) -> impl Iterator<Item = &BenchRow> {
        self.rows
            .iter()
            .filter(move |r| r.report.knowledge == knowledge)
    }

    pub fn runs(&self, knowledge: bool) -> usize {
        self.mode(knowledge).count()
    }

    pub fn solved(&self, knowledge: bool) -> usize {
        self.mode(knowledge)
            .filter(|r| r.report.outcome == Outcome::Solved)
            .count()
    }

    /// Mean wall time over all runs of the mode; unsolved runs count with the
    /// time they used.
    pub fn mean_time(&self, knowledge: bool) -> f64 {
        let t: Vec<f64> = self.mode(knowledge).map(|r| r.report.wall_time_s).collect();
        t.iter().sum::<f64>() / t.len().max(1) as f64
    }

    pub fn median_time(&self, knowledge: bool) -> f64 {
        let mut t: Vec<f64> = self.mode(knowledge).map(|r| r.report.wall_time_s).collect();
        if t.is_empty() {
            return 0.0;
        }
        t.sort_by(f64::total_cmp);
        let m = t.len() / 2;
        if t.len() % 2 == 1 {
            t[m]
        } else {
            0.5 * (t[m - 1] + t[m])
        }
    }

    pub fn all_verified(&self) -> bool {
        self.rows.iter().all(|r| r.verified != Some(false))
    }
}

/// Runs every seed in each requested mode, replay-checking each solution.
/// `on_row` sees rows as they finish.
pub fn bench(
    task: &Task,
    seeds: &[u64],
    tmax: f64,
    modes: &[bool],
    on_row: &mut dyn FnMut(&BenchRow),
) -> Result<BenchSummary, (String, i32)> {
    let mut summary = BenchSummary::default();
    for &knowledge in modes {
        for &seed in seeds {
            let (report, file) = run_plan(task, seed, tmax, knowledge)?;
            let verified = file.as_ref().map(|f| {
                TrajectoryFile::parse(&f.to_text())
                    .map_err(CheckFailure::Replay)
                    .and_then(|f| check_trajectory(&task.scene, &task.phi, &f))
                    .is_ok()
            });
            let row = BenchRow {
                report,
                trajectory: file,
                verified,
            };
            on_row(&row);
            summary.rows.push(row);
        }
    }
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub runs: u32,
    pub seed: Option<u64>,
    pub tmax: Option<f64>,
    pub out: Option<PathBuf>,
    /// Skip the knowledge-on rows.
    pub only_baseline: bool,
}

pub fn cmd_bench(
    scene: &Path,
    formula: &str,
    opts: &BenchOptions,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32 {
    let task = match load_task(scene, formula) {
        Ok(t) => t,
        Err(msg) => return fail(err, &msg, EXIT_USAGE),
    };
    if opts.runs == 0 {
        return fail(err, "error: --runs must be at least 1", EXIT_USAGE);
    }
    let first = opts.seed.unwrap_or(task.scene.planner.seed);
    let seeds: Vec<u64> = (0..opts.runs as u64).map(|i| first + i).collect();
    let tmax = opts.tmax.unwrap_or(task.scene.planner.t_max_s);
    let modes: &[bool] = if opts.only_baseline {
        &[false]
    } else {
        &[true, false]
    };

    let _ = writeln!(
        out,
        "{:>6}  {:<4} {:<10} {:>9} {:>8}  {:<8} psi",
        "seed", "kb", "outcome", "time_s", "tree", "check"
    );
    let summary = bench(&task, &seeds, tmax, modes, &mut |row| {
        let r = &row.report;
        let check = match row.verified {
            Some(true) => "ok",
            Some(false) => "FAILED",
            None => "-",
        };
        let _ = writeln!(
            out,
            "{:>6}  {:<4} {:<10} {:>9.3} {:>8}  {:<8} {}",
            r.seed,
            if r.knowledge { "on" } else { "off" },
            outcome_name(r.outcome),
            r.wall_time_s,
            r.tree_size,
            check,
            r.psi.as_deref().unwrap_or("INFEASIBLE")
        );
        let _ = out.flush();
    });
    let summary = match summary {
        Ok(s) => s,
        Err((msg, code)) => return fail(err, &msg, code),
    };

    let _ = writeln!(out);
    let _ = writeln!(
        out,
        "{:<4} {:>8} {:>6} {:>9} {:>9}",
        "kb", "solved", "rate", "mean_s", "median_s"
    );
    for &k in modes {
        let n = summary.runs(k);
        let s = summary.solved(k);
        let _ = writeln!(
            out,
            "{:<4} {:>8} {:>6.2} {:>9.3} {:>9.3}",
            if k { "on" } else { "off" },
            format!("{s}/{n}"),
            s as f64 / n as f64,
            summary.mean_time(k),
            summary.median_time(k)
        );
    }
    if let Some(dir) = &opts.out {
        let reports: Vec<&RunReport> = summary.rows.iter().map(|r| &r.report).collect();
        let written = fs::create_dir_all(dir).and_then(|_| {
            let json = serde_json::to_string_pretty(&reports).map_err(std::io::Error::other)?;
            fs::write(dir.join("bench.json"), json + "\n")
        });
        if let Err(e) = written {
            return fail(err, &format!("error: {e}"), 1);
        }
    }
    if summary.all_verified() {
        EXIT_SOLVED
    } else {
        fail(
            err,
            "error: a solution failed its replay check",
            EXIT_REJECTED,
        )
    }
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Solved => "solved",
        Outcome::Infeasible => "infeasible",
        Outcome::Timeout => "timeout",
    }
}

fn fail(err: &mut dyn Write, msg: &str, code: i32) -> i32 {
    let _ = writeln!(err, "{msg}");
    code
}
