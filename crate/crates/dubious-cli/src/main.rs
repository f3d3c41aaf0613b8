//! Command-line driver: plan trajectories, evaluate them against scenarios,
//! render scenes and belief traces, and validate scenario files.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use dubious::export::{
    parse_scenario_or_manifest, parse_trajectory_csv, run_plan, run_render, run_report, Strategy,
};
use dubious::{ScenarioF64, TrajectoryF64};

#[derive(Parser)]
#[command(
    name = "dubious",
    version,
    about = "Plan and evaluate trajectories that are legible to allied observers and illegible to adversarial ones"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum StrategyArg {
    DubiousDecoy,
    DubiousAmbiguous,
    Efficient,
    MaxLegible,
    MaxDecoy,
}

impl From<StrategyArg> for Strategy {
    fn from(v: StrategyArg) -> Self {
        match v {
            StrategyArg::DubiousDecoy => Strategy::DubiousDecoy,
            StrategyArg::DubiousAmbiguous => Strategy::DubiousAmbiguous,
            StrategyArg::Efficient => Strategy::Efficient,
            StrategyArg::MaxLegible => Strategy::MaxLegible,
            StrategyArg::MaxDecoy => Strategy::MaxDecoy,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Plan a trajectory and write all run artifacts to a directory.
    Plan {
        /// Scenario file (or a manifest from a previous run).
        #[arg(long)]
        scenario: PathBuf,
        /// Planning strategy. Defaults to the manifest's strategy when
        /// replaying a manifest, otherwise to dubious-decoy.
        #[arg(long, value_enum)]
        strategy: Option<StrategyArg>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Override the optimizer iteration count.
        #[arg(long)]
        iterations: Option<usize>,
        /// Override the random seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Record a snapshot of the iterate every N iterations.
        #[arg(long)]
        snapshot_every: Option<usize>,
    },
    /// Evaluate trajectory CSVs against a scenario and write a metrics table.
    Report {
        #[arg(long)]
        scenario: PathBuf,
        /// Output table path.
        #[arg(long)]
        out: PathBuf,
        /// Trajectory CSV files; rows are labeled by file stem.
        #[arg(required = true)]
        trajectories: Vec<PathBuf>,
    },
    /// Render the scene and belief plots for existing trajectories.
    Render {
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Trajectory CSV files; artifacts are labeled by file stem.
        #[arg(required = true)]
        trajectories: Vec<PathBuf>,
    },
    /// Parse and validate a scenario file.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
    },
}

fn load_scenario(path: &Path) -> Result<(ScenarioF64, Option<Strategy>)> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let parsed = parse_scenario_or_manifest(&text)
        .with_context(|| format!("validating {}", path.display()))?;
    Ok(parsed)
}

fn label_for(path: &Path) -> String {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "trajectory".to_owned());
    // plan runs all call their output trajectory.csv; use the run directory
    // as the label so reports over several runs stay readable
    if stem == "trajectory" {
        if let Some(dir) = path.parent().and_then(|p| p.file_name()) {
            return dir.to_string_lossy().into_owned();
        }
    }
    stem
}

fn load_trajectories(paths: &[PathBuf]) -> Result<Vec<(String, TrajectoryF64)>> {
    let mut labeled = Vec::with_capacity(paths.len());
    for path in paths {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let traj = parse_trajectory_csv(&text)
            .with_context(|| format!("parsing {}", path.display()))?;
        labeled.push((label_for(path), traj));
    }
    Ok(labeled)
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Plan {
            scenario,
            strategy,
            out,
            iterations,
            seed,
            snapshot_every,
        } => {
            let (mut scn, manifest_strategy) = load_scenario(&scenario)?;
            let strategy = match (strategy, manifest_strategy) {
                (Some(s), _) => s.into(),
                (None, Some(s)) => s,
                (None, None) => Strategy::DubiousDecoy,
            };
            if let Some(iterations) = iterations {
                scn.stomp.iterations = iterations;
            }
            if let Some(seed) = seed {
                scn.stomp.seed = seed;
            }
            if let Some(every) = snapshot_every {
                scn.stomp.record_every = Some(every);
            }
            let artifacts = run_plan(&scn, strategy, &out)?;
            println!(
                "planned `{strategy}` into {} ({} files)",
                artifacts.dir.display(),
                artifacts.files.len()
            );
        }
        Command::Report {
            scenario,
            out,
            trajectories,
        } => {
            let (scn, _) = load_scenario(&scenario)?;
            let labeled = load_trajectories(&trajectories)?;
            run_report(&scn, &labeled, &out)?;
            println!("wrote metrics table to {}", out.display());
        }
        Command::Render {
            scenario,
            out,
            trajectories,
        } => {
            let (scn, _) = load_scenario(&scenario)?;
            let labeled = load_trajectories(&trajectories)?;
            let artifacts = run_render(&scn, &labeled, &out)?;
            println!(
                "rendered {} files into {}",
                artifacts.files.len(),
                artifacts.dir.display()
            );
        }
        Command::Validate { scenario } => {
            let text = std::fs::read_to_string(&scenario)
                .with_context(|| format!("reading {}", scenario.display()))?;
            match parse_scenario_or_manifest::<f64>(&text) {
                Ok((scn, _)) => {
                    println!(
                        "{}: ok ({} goals, {} observers, {} steps)",
                        scenario.display(),
                        scn.goals.len(),
                        scn.observers.len(),
                        scn.trajectory_steps
                    );
                }
                Err(e) => bail!("{}: {e}", scenario.display()),
            }
        }
    }
    Ok(())
}
