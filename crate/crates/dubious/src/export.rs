//! Run artifacts: trajectory and belief CSVs, metrics tables, SVG renderings
//! of scenes and belief traces, and the run manifest. All output is
//! byte-stable: floats in CSVs use the shortest round-trip form, SVG
//! coordinates use fixed three-decimal formatting, and nothing depends on
//! time or environment.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand_distr::{Distribution, StandardNormal};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::baselines::{efficient_trajectory, max_decoy_baseline, max_legible_baseline};
use crate::legibility::{GoalSet, Trajectory};
use crate::metrics::{build_report, MetricsReport};
use crate::observers::{belief_trace, BeliefTrace};
use crate::scalar::Real;
use crate::scenario::{parse_scenario, serialize_scenario, Scenario};
use crate::stomp::{optimize, OptimizationResult};
use crate::{Error, Result};

/// Planning strategy selected on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Plan against the scenario's observers with the decoy strategy
    /// (`alpha_neg = +1`).
    DubiousDecoy,
    /// Plan against the scenario's observers with the avoidance strategy
    /// (`alpha_neg = -1`).
    DubiousAmbiguous,
    /// The straight-line minimum-cost trajectory.
    Efficient,
    /// Maximize legibility under a single full-visibility `+1` observer.
    MaxLegible,
    /// Maximize decoy legibility under a single full-visibility `-1` observer.
    MaxDecoy,
}

impl Strategy {
    pub const ALL: [Strategy; 5] = [
        Strategy::DubiousDecoy,
        Strategy::DubiousAmbiguous,
        Strategy::Efficient,
        Strategy::MaxLegible,
        Strategy::MaxDecoy,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::DubiousDecoy => "dubious-decoy",
            Strategy::DubiousAmbiguous => "dubious-ambiguous",
            Strategy::Efficient => "efficient",
            Strategy::MaxLegible => "max-legible",
            Strategy::MaxDecoy => "max-decoy",
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| {
                Error::invalid(
                    "strategy",
                    format!(
                        "unknown strategy `{s}` (expected one of: {})",
                        Strategy::ALL.map(|v| v.name()).join(", ")
                    ),
                )
            })
    }
}

/// Errors from run drivers: planning failures plus file I/O with the path.
#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Plan(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn write_file(path: &Path, contents: &str) -> std::result::Result<(), RunError> {
    std::fs::write(path, contents).map_err(|source| RunError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Output directory of one planning run.
#[derive(Debug, Clone)]
pub struct RunArtifacts {
    pub dir: PathBuf,
    pub files: Vec<PathBuf>,
}

// ---- formatting ----

/// Percentage with at most one decimal: `65%`, `82.5%`.
fn fmt_pct<T: Real>(v: T) -> String {
    let s = format!("{:.1}", v);
    let s = s.strip_suffix(".0").unwrap_or(&s);
    format!("{s}%")
}

fn fmt_score<T: Real>(v: T) -> String {
    format!("{:.3}", v)
}

fn fmt_opt<T: Real>(v: &Option<T>, f: impl Fn(T) -> String) -> String {
    match v {
        Some(v) => f(*v),
        None => "---".to_owned(),
    }
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

// ---- CSV ----

/// `t,x,y` rows, one per waypoint, shortest round-trip float form.
pub fn trajectory_csv<T: Real>(traj: &Trajectory<T>) -> String {
    let mut out = String::from("t,x,y\n");
    for (t, p) in traj.waypoints().iter().enumerate() {
        let _ = writeln!(out, "{t},{},{}", p.x, p.y);
    }
    out
}

/// Parse a trajectory CSV produced by [`trajectory_csv`]; waypoints are
/// recovered bit-exactly.
pub fn parse_trajectory_csv<T>(text: &str) -> Result<Trajectory<T>>
where
    T: Real + std::str::FromStr,
{
    let mut pts = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 {
            if line.trim() != "t,x,y" {
                return Err(Error::invalid(
                    "trajectory csv",
                    format!("unexpected header `{line}`"),
                ));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let bad = |what: &str| {
            Error::invalid(
                format!("trajectory csv line {}", lineno + 1),
                what.to_owned(),
            )
        };
        let _t = fields.next().ok_or_else(|| bad("missing t"))?;
        let x = fields
            .next()
            .and_then(|v| v.parse::<T>().ok())
            .ok_or_else(|| bad("bad x"))?;
        let y = fields
            .next()
            .and_then(|v| v.parse::<T>().ok())
            .ok_or_else(|| bad("bad y"))?;
        pts.push(crate::geometry::Point2::new(x, y));
    }
    Trajectory::new(pts)
}

/// Long-form belief export: `t,goal,prob,visible`, `(T+1) * goal_count` rows.
pub fn belief_csv<T: Real>(belief: &BeliefTrace<T>, goals: &GoalSet<T>) -> String {
    let mut out = String::from("t,goal,prob,visible\n");
    for t in 0..belief.len() {
        let post = belief.posterior(t);
        for g in 0..goals.len() {
            let _ = writeln!(
                out,
                "{t},{},{},{}",
                goals.id(g),
                post.prob(g),
                belief.visible_at(t)
            );
        }
    }
    out
}

/// `iteration,best_cost` rows.
pub fn cost_history_csv<T: Real>(history: &[T]) -> String {
    let mut out = String::from("iteration,best_cost\n");
    for (i, c) in history.iter().enumerate() {
        let _ = writeln!(out, "{i},{c}");
    }
    out
}

/// `iteration,t,x,y` rows for every snapshot waypoint.
pub fn snapshots_csv<T: Real>(snapshots: &[(usize, Trajectory<T>)]) -> String {
    let mut out = String::from("iteration,t,x,y\n");
    for (iter, traj) in snapshots {
        for (t, p) in traj.waypoints().iter().enumerate() {
            let _ = writeln!(out, "{iter},{t},{},{}", p.x, p.y);
        }
    }
    out
}

// ---- metrics table ----

/// Comma-separated metrics table, one row per (trajectory, observer), with
/// `---` for non-applicable cells. Column order is fixed for golden-file
/// comparisons.
pub fn metrics_table<T: Real>(reports: &[MetricsReport<T>]) -> String {
    let mut out =
        String::from("trajectory,observer,earliest,pct_correct,legibility,illeg_decoy,illeg_ambiguous\n");
    for report in reports {
        for (observer, m) in &report.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                report.label,
                observer,
                fmt_opt(&m.earliest_correct_pct, fmt_pct),
                fmt_opt(&m.pct_correct_after_first, fmt_pct),
                fmt_opt(&m.legibility, fmt_score),
                fmt_opt(&m.illeg_decoy, fmt_score),
                fmt_opt(&m.illeg_ambiguous, fmt_score),
            );
        }
    }
    out
}

// ---- SVG ----

const TRAJECTORY_PALETTE: [&str; 6] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02",
];

struct SceneMap {
    min_x: f64,
    max_y: f64,
    scale: f64,
    pad: f64,
}

impl SceneMap {
    fn x(&self, wx: f64) -> f64 {
        self.pad + (wx - self.min_x) * self.scale
    }

    fn y(&self, wy: f64) -> f64 {
        self.pad + (self.max_y - wy) * self.scale
    }
}

fn f3(v: f64) -> String {
    format!("{v:.3}")
}

/// Render the scenario and any number of labeled trajectories: workspace
/// frame, observer regions shaded green (positive) or red (negative) with
/// opacity scaled by the motive magnitude, goal markers (true goal solid
/// blue, decoy ringed orange), the start, and one polyline per trajectory.
pub fn scene_svg<T: Real>(scenario: &Scenario<T>, labeled: &[(String, Trajectory<T>)]) -> String {
    let to = |v: T| v.to_f64().expect("finite workspace coordinate");
    let min = scenario.bounds.min();
    let max = scenario.bounds.max();
    let (min_x, min_y, max_x, max_y) = (to(min.x), to(min.y), to(max.x), to(max.y));
    let world_w = max_x - min_x;
    let world_h = max_y - min_y;
    let pad = 24.0;
    let content_w = 640.0;
    let scale = content_w / world_w;
    let width = content_w + 2.0 * pad;
    let height = world_h * scale + 2.0 * pad;
    let map = SceneMap {
        min_x,
        max_y,
        scale,
        pad,
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"##,
        f3(width),
        f3(height),
        f3(width),
        f3(height)
    );
    let _ = writeln!(
        svg,
        r##"  <rect x="{}" y="{}" width="{}" height="{}" fill="#ffffff" stroke="#404040" stroke-width="1"/>"##,
        f3(map.x(min_x)),
        f3(map.y(max_y)),
        f3(world_w * scale),
        f3(world_h * scale)
    );

    for obs in &scenario.observers {
        let motive = to(obs.motive());
        let (fill, stroke) = if motive < 0.0 {
            ("#c62828", "#8e1b1b")
        } else {
            ("#2e7d32", "#1c5221")
        };
        let opacity = 0.12 + 0.38 * motive.abs();
        let points = obs
            .region()
            .vertices()
            .iter()
            .map(|p| format!("{},{}", f3(map.x(to(p.x))), f3(map.y(to(p.y)))))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            svg,
            r##"  <polygon points="{points}" fill="{fill}" fill-opacity="{}" stroke="{stroke}" stroke-width="1"><title>{} (motive {})</title></polygon>"##,
            f3(opacity),
            xml_escape(obs.id().as_str()),
            obs.motive(),
        );
    }

    let true_index = scenario.goals.index_of(&scenario.true_goal);
    let decoy_index = scenario
        .objective
        .decoy_goal
        .as_ref()
        .and_then(|d| scenario.goals.index_of(d));
    for (g, (id, pos)) in scenario.goals.iter().enumerate() {
        let cx = f3(map.x(to(pos.x)));
        let cy = f3(map.y(to(pos.y)));
        let (fill, stroke) = if Some(g) == true_index {
            ("#1565c0", "#0d3c6e")
        } else if Some(g) == decoy_index {
            ("#ffffff", "#ef6c00")
        } else {
            ("#9e9e9e", "#616161")
        };
        let _ = writeln!(
            svg,
            r##"  <circle cx="{cx}" cy="{cy}" r="6" fill="{fill}" stroke="{stroke}" stroke-width="2"/>"##
        );
        let _ = writeln!(
            svg,
            r##"  <text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="#212121">{}</text>"##,
            f3(map.x(to(pos.x)) + 9.0),
            f3(map.y(to(pos.y)) + 4.0),
            xml_escape(id.as_str())
        );
    }

    let _ = writeln!(
        svg,
        r##"  <rect x="{}" y="{}" width="10" height="10" fill="#212121"/>"##,
        f3(map.x(to(scenario.start.x)) - 5.0),
        f3(map.y(to(scenario.start.y)) - 5.0)
    );
    let _ = writeln!(
        svg,
        r##"  <text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="#212121">start</text>"##,
        f3(map.x(to(scenario.start.x)) + 9.0),
        f3(map.y(to(scenario.start.y)) + 4.0)
    );

    for (idx, (label, traj)) in labeled.iter().enumerate() {
        let color = TRAJECTORY_PALETTE[idx % TRAJECTORY_PALETTE.len()];
        let points = traj
            .waypoints()
            .iter()
            .map(|p| format!("{},{}", f3(map.x(to(p.x))), f3(map.y(to(p.y)))))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            svg,
            r##"  <polyline points="{points}" fill="none" stroke="{color}" stroke-width="2"/>"##
        );
        let ly = 16.0 + 16.0 * idx as f64;
        let _ = writeln!(
            svg,
            r##"  <rect x="{}" y="{}" width="12" height="4" fill="{color}"/>"##,
            f3(pad + 6.0),
            f3(ly - 4.0)
        );
        let _ = writeln!(
            svg,
            r##"  <text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="#212121">{}</text>"##,
            f3(pad + 22.0),
            f3(ly),
            xml_escape(label)
        );
    }

    svg.push_str("</svg>\n");
    svg
}

/// Render a belief trace: per-goal probability curves over time with shaded
/// visibility intervals.
pub fn belief_svg<T: Real>(belief: &BeliefTrace<T>, goals: &GoalSet<T>) -> String {
    let to = |v: T| v.to_f64().expect("finite probability");
    let total = belief.len() - 1;
    let (width, height, pad) = (640.0, 300.0, 40.0);
    let plot_w = width - 2.0 * pad;
    let plot_h = height - 2.0 * pad;
    let x = |t: usize| pad + plot_w * t as f64 / total as f64;
    let y = |p: f64| pad + plot_h * (1.0 - p);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"##
    );
    let _ = writeln!(
        svg,
        r##"  <rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>"##
    );

    // shaded visibility runs
    let mut t = 0;
    while t <= total {
        if belief.visible_at(t) {
            let run_start = t;
            while t + 1 <= total && belief.visible_at(t + 1) {
                t += 1;
            }
            let _ = writeln!(
                svg,
                r##"  <rect x="{}" y="{}" width="{}" height="{}" fill="#e8e8e8"/>"##,
                f3(x(run_start)),
                f3(pad),
                f3((x(t) - x(run_start)).max(1.0)),
                f3(plot_h)
            );
        }
        t += 1;
    }

    for (gy, label) in [(0.0, "0"), (0.5, "0.5"), (1.0, "1")] {
        let _ = writeln!(
            svg,
            r##"  <line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#bdbdbd" stroke-width="1"/>"##,
            f3(pad),
            f3(y(gy)),
            f3(width - pad),
            f3(y(gy))
        );
        let _ = writeln!(
            svg,
            r##"  <text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="#424242">{label}</text>"##,
            f3(pad - 24.0),
            f3(y(gy) + 4.0)
        );
    }
    let _ = writeln!(
        svg,
        r##"  <text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="#424242">t=0</text>"##,
        f3(pad),
        f3(height - pad + 16.0)
    );
    let _ = writeln!(
        svg,
        r##"  <text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="#424242">t={total}</text>"##,
        f3(width - pad - 20.0),
        f3(height - pad + 16.0)
    );

    for g in 0..goals.len() {
        let color = TRAJECTORY_PALETTE[g % TRAJECTORY_PALETTE.len()];
        let points = (0..=total)
            .map(|t| format!("{},{}", f3(x(t)), f3(y(to(belief.posterior(t).prob(g))))))
            .collect::<Vec<_>>()
            .join(" ");
        let _ = writeln!(
            svg,
            r##"  <polyline points="{points}" fill="none" stroke="{color}" stroke-width="2"/>"##
        );
        let ly = 16.0 + 14.0 * g as f64;
        let _ = writeln!(
            svg,
            r##"  <rect x="{}" y="{}" width="12" height="4" fill="{color}"/>"##,
            f3(width - pad - 110.0),
            f3(ly - 4.0)
        );
        let _ = writeln!(
            svg,
            r##"  <text x="{}" y="{}" font-family="sans-serif" font-size="11" fill="#212121">{}</text>"##,
            f3(width - pad - 94.0),
            f3(ly),
            xml_escape(goals.id(g).as_str())
        );
    }

    svg.push_str("</svg>\n");
    svg
}

// ---- manifest ----

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunSection {
    version: String,
    strategy: String,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    run: RunSection,
    scenario: toml::Value,
}

/// The manifest records the crate version, the strategy, and the fully
/// resolved scenario; feeding it back to `plan` reproduces the run
/// bit-identically.
pub fn manifest_toml<T>(scenario: &Scenario<T>, strategy: Strategy) -> String
where
    T: Real + Serialize,
{
    let scenario_value: toml::Value =
        toml::from_str(&serialize_scenario(scenario)).expect("serialized scenario is valid TOML");
    let manifest = RawManifest {
        run: RunSection {
            version: env!("CARGO_PKG_VERSION").to_owned(),
            strategy: strategy.name().to_owned(),
        },
        scenario: scenario_value,
    };
    toml::to_string(&manifest).expect("manifest serialization cannot fail")
}

/// Parse either a scenario document or a run manifest. Returns the strategy
/// when the document was a manifest.
pub fn parse_scenario_or_manifest<T>(text: &str) -> Result<(Scenario<T>, Option<Strategy>)>
where
    T: Real + DeserializeOwned,
{
    if let Ok(manifest) = toml::from_str::<RawManifest>(text) {
        let scenario_text =
            toml::to_string(&manifest.scenario).expect("re-serializing a TOML value cannot fail");
        let scenario = parse_scenario(&scenario_text)?;
        let strategy = manifest.run.strategy.parse()?;
        return Ok((scenario, Some(strategy)));
    }
    Ok((parse_scenario(text)?, None))
}

// ---- run drivers ----

/// Produce the strategy's trajectory. Optimizer-backed strategies also return
/// the full optimization result.
pub fn plan_trajectory<T>(
    scenario: &Scenario<T>,
    strategy: Strategy,
) -> Result<(Trajectory<T>, Option<OptimizationResult<T>>)>
where
    T: Real + Send + Sync,
    StandardNormal: Distribution<T>,
{
    let goal = scenario.true_goal_position()?;
    match strategy {
        Strategy::Efficient => Ok((
            efficient_trajectory(scenario.start, goal, scenario.trajectory_steps),
            None,
        )),
        Strategy::MaxLegible => {
            let traj = max_legible_baseline(scenario, &scenario.stomp)?;
            Ok((traj, None))
        }
        Strategy::MaxDecoy => {
            let traj = max_decoy_baseline(scenario, &scenario.stomp)?;
            Ok((traj, None))
        }
        Strategy::DubiousDecoy | Strategy::DubiousAmbiguous => {
            let mut derived = scenario.clone();
            derived.objective.alpha_neg = if strategy == Strategy::DubiousDecoy { 1 } else { -1 };
            let cfg = derived.stomp.clone();
            let result = optimize(&derived, &cfg)?;
            Ok((result.best_trajectory.clone(), Some(result)))
        }
    }
}

/// Run one planning job and write every artifact into `out_dir`: manifest,
/// trajectory CSV, per-observer belief CSV and SVG, metrics table, scene SVG,
/// and (for optimizer-backed strategies) the cost history and snapshots.
pub fn run_plan<T>(
    scenario: &Scenario<T>,
    strategy: Strategy,
    out_dir: &Path,
) -> std::result::Result<RunArtifacts, RunError>
where
    T: Real + Send + Sync + Serialize,
    StandardNormal: Distribution<T>,
{
    scenario.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|source| RunError::Io {
        path: out_dir.to_owned(),
        source,
    })?;
    let mut files = Vec::new();
    let mut emit = |name: &str, contents: String| -> std::result::Result<(), RunError> {
        let path = out_dir.join(name);
        write_file(&path, &contents)?;
        files.push(path);
        Ok(())
    };

    let (trajectory, opt) = plan_trajectory(scenario, strategy)?;

    emit("manifest.toml", manifest_toml(scenario, strategy))?;
    emit("trajectory.csv", trajectory_csv(&trajectory))?;

    let labeled = vec![(strategy.name().to_owned(), trajectory.clone())];
    let reports = build_report(scenario, &labeled)?;
    emit("metrics.csv", metrics_table(&reports))?;
    emit("scene.svg", scene_svg(scenario, &labeled))?;

    for obs in &scenario.observers {
        let belief = belief_trace(
            &trajectory,
            obs,
            &scenario.goals,
            &scenario.objective.inference,
        )?;
        emit(
            &format!("belief_{}.csv", obs.id()),
            belief_csv(&belief, &scenario.goals),
        )?;
        emit(
            &format!("belief_{}.svg", obs.id()),
            belief_svg(&belief, &scenario.goals),
        )?;
    }

    if let Some(result) = &opt {
        emit("cost_history.csv", cost_history_csv(&result.cost_history))?;
        if !result.snapshots.is_empty() {
            emit("snapshots.csv", snapshots_csv(&result.snapshots))?;
        }
    }

    Ok(RunArtifacts {
        dir: out_dir.to_owned(),
        files,
    })
}

/// Evaluate labeled trajectories against a scenario and write the metrics
/// table to `out_file`. Trajectories must match the scenario's endpoints and
/// step count.
pub fn run_report<T>(
    scenario: &Scenario<T>,
    labeled: &[(String, Trajectory<T>)],
    out_file: &Path,
) -> std::result::Result<(), RunError>
where
    T: Real,
{
    scenario.validate()?;
    let goal = scenario.true_goal_position()?;
    for (label, traj) in labeled {
        if traj.start() != scenario.start || traj.end() != goal {
            return Err(Error::invalid(
                format!("trajectory `{label}`"),
                "endpoints do not match the scenario's start and true goal",
            )
            .into());
        }
    }
    let reports = build_report(scenario, labeled)?;
    write_file(out_file, &metrics_table(&reports))
}

/// Render the scene SVG plus per-(trajectory, observer) belief plots into
/// `out_dir` without planning.
pub fn run_render<T>(
    scenario: &Scenario<T>,
    labeled: &[(String, Trajectory<T>)],
    out_dir: &Path,
) -> std::result::Result<RunArtifacts, RunError>
where
    T: Real + Serialize,
{
    scenario.validate()?;
    std::fs::create_dir_all(out_dir).map_err(|source| RunError::Io {
        path: out_dir.to_owned(),
        source,
    })?;
    let mut files = Vec::new();

    let scene_path = out_dir.join("scene.svg");
    write_file(&scene_path, &scene_svg(scenario, labeled))?;
    files.push(scene_path);

    for (label, traj) in labeled {
        for obs in &scenario.observers {
            let belief = belief_trace(
                traj,
                obs,
                &scenario.goals,
                &scenario.objective.inference,
            )?;
            let csv_path = out_dir.join(format!("belief_{label}_{}.csv", obs.id()));
            write_file(&csv_path, &belief_csv(&belief, &scenario.goals))?;
            files.push(csv_path);
            let svg_path = out_dir.join(format!("belief_{label}_{}.svg", obs.id()));
            write_file(&svg_path, &belief_svg(&belief, &scenario.goals))?;
            files.push(svg_path);
        }
    }

    Ok(RunArtifacts {
        dir: out_dir.to_owned(),
        files,
    })
}
