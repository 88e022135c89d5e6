use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use cosafe_cli::commands::{
    cmd_bench, cmd_check, cmd_evaluate, cmd_plan, BenchOptions, PlanOptions,
};

/// Co-safe LTL task and motion planning among pushable obstacles.
#[derive(Parser)]
#[command(name = "cosafe-tamp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan a trajectory satisfying the formula.
    Plan {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        seed: Option<u64>,
        /// Planning budget in seconds.
        #[arg(long)]
        tmax: Option<f64>,
        /// Directory receiving report.json and trajectory.traj.
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Also render the run as SVG to this path.
        #[arg(long)]
        svg: Option<PathBuf>,
        /// Freeze the initial knowledge and skip formula simplification.
        #[arg(long)]
        no_knowledge: bool,
    },
    /// Replay a trajectory file and check its trace against the formula.
    Check {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long)]
        trajectory: PathBuf,
    },
    /// Print the nonvalid propositions and the simplified formula.
    Evaluate {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Plan over consecutive seeds with and without knowledge reasoning.
    Bench {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 10)]
        runs: u32,
        /// First seed; runs use consecutive seeds from here.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tmax: Option<f64>,
        /// Directory receiving bench.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run only the baseline without knowledge reasoning.
        #[arg(long)]
        no_knowledge: bool,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let code = match cli.command {
        Command::Plan {
            scene,
            formula,
            seed,
            tmax,
            out: dir,
            svg,
            no_knowledge,
        } => {
            let opts = PlanOptions {
                seed,
                tmax,
                knowledge: !no_knowledge,
                out: dir,
                svg,
            };
            cmd_plan(&scene, &formula, &opts, &mut out, &mut err)
        }
        Command::Check {
            scene,
            formula,
            trajectory,
        } => cmd_check(&scene, &formula, &trajectory, &mut out, &mut err),
        Command::Evaluate { scene, formula } => cmd_evaluate(&scene, &formula, &mut out, &mut err),
        Command::Bench {
            scene,
            formula,
            runs,
            seed,
            tmax,
            out: dir,
            no_knowledge,
        } => {
            let opts = BenchOptions {
                runs,
                seed,
                tmax,
                out: dir,
                only_baseline: no_knowledge,
            };
            cmd_bench(&scene, &formula, &opts, &mut out, &mut err)
        }
    };
    ExitCode::from(code as u8)
}
