//! Shared test support: an independent, deliberately naive implementation of
//! the scoring formulas (no stabilization, no incremental accumulation, no
//! shared code with the library's evaluation path) plus lattice-trajectory
//! enumeration. Used as the ground-truth oracle.

#![allow(dead_code)]

use dubious::geometry::Point2;
use dubious::legibility::Trajectory;

pub struct OracleGoals {
    pub positions: Vec<(f64, f64)>,
    pub prior: Vec<f64>,
}

impl OracleGoals {
    pub fn uniform(positions: Vec<(f64, f64)>) -> Self {
        let n = positions.len();
        Self {
            positions,
            prior: vec![1.0 / n as f64; n],
        }
    }
}

fn sq_dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)
}

/// Naive quadratic path cost over a point list.
pub fn oracle_path_cost(points: &[(f64, f64)]) -> f64 {
    let mut c = 0.0;
    for i in 1..points.len() {
        c += 0.5 * sq_dist(points[i - 1], points[i]);
    }
    c
}

/// Direct transcription of the posterior formula, without max-subtraction.
pub fn oracle_posterior(
    prefix: &[(f64, f64)],
    goals: &OracleGoals,
    total_steps: usize,
    beta: f64,
) -> Vec<f64> {
    let t = prefix.len() - 1;
    let q = prefix[t];
    let anchor = prefix[0];
    let c_prefix = oracle_path_cost(prefix);
    let remaining = (total_steps - t).max(1) as f64;
    let mut weights = Vec::new();
    for (g, &goal) in goals.positions.iter().enumerate() {
        let to_go = sq_dist(q, goal) / (2.0 * remaining);
        let from_start = sq_dist(anchor, goal) / (2.0 * total_steps as f64);
        let w = (-beta * (c_prefix + to_go - from_start)).exp() * goals.prior[g];
        weights.push(w);
    }
    let sum: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / sum).collect()
}

fn prefix_of(points: &[(f64, f64)], t: usize) -> &[(f64, f64)] {
    &points[..=t]
}

/// Per-timestep evaluation of the legibility sum toward goal `g`.
pub fn oracle_legibility(
    points: &[(f64, f64)],
    goals: &OracleGoals,
    g: usize,
    beta: f64,
) -> f64 {
    let total = points.len() - 1;
    let mut num = 0.0;
    let mut den = 0.0;
    for t in 0..=total {
        let p = oracle_posterior(prefix_of(points, t), goals, total, beta);
        let w = (total - t) as f64;
        num += p[g] * w;
        den += w;
    }
    num / den
}

/// Per-timestep evaluation of the ambiguity sum (no table scaling).
pub fn oracle_ambiguous(
    points: &[(f64, f64)],
    goals: &OracleGoals,
    true_goal: usize,
    beta: f64,
) -> f64 {
    let total = points.len() - 1;
    let n = goals.positions.len() as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for t in 0..=total {
        let p = oracle_posterior(prefix_of(points, t), goals, total, beta);
        let mut diff = 0.0;
        for (g, &pg) in p.iter().enumerate() {
            if g != true_goal {
                diff += (p[true_goal] - pg).abs();
            }
        }
        let w = (total - t) as f64;
        num += (1.0 - diff / n) * w;
        den += w;
    }
    num / den
}

/// Visible-portion posterior: per-segment costs, anchored at first sighting.
pub fn oracle_visible_posterior(
    samples: &[(usize, (f64, f64))],
    goals: &OracleGoals,
    total_steps: usize,
    beta: f64,
) -> Vec<f64> {
    if samples.is_empty() {
        return goals.prior.clone();
    }
    let mut cost = 0.0;
    let mut i = 0;
    while i < samples.len() {
        let mut j = i + 1;
        while j < samples.len() && samples[j].0 == samples[j - 1].0 + 1 {
            cost += 0.5 * sq_dist(samples[j - 1].1, samples[j].1);
            j += 1;
        }
        i = j;
    }
    let (t0, anchor) = samples[0];
    let (tl, latest) = samples[samples.len() - 1];
    let rem_latest = (total_steps - tl).max(1) as f64;
    let rem_anchor = (total_steps - t0).max(1) as f64;
    let mut weights = Vec::new();
    for (g, &goal) in goals.positions.iter().enumerate() {
        let e = -beta
            * (cost + sq_dist(latest, goal) / (2.0 * rem_latest)
                - sq_dist(anchor, goal) / (2.0 * rem_anchor));
        weights.push(e.exp() * goals.prior[g]);
    }
    let sum: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / sum).collect()
}

/// Visible-portion score triple (legibility toward `true_goal`, decoy score
/// toward `decoy`, ambiguity), with `(T_o - 1 - rank)` weighting.
pub fn oracle_visible_scores(
    points: &[(f64, f64)],
    inside: impl Fn((f64, f64)) -> bool,
    goals: &OracleGoals,
    true_goal: usize,
    decoy: usize,
    beta: f64,
) -> (f64, f64, f64) {
    let total = points.len() - 1;
    let samples: Vec<(usize, (f64, f64))> = points
        .iter()
        .enumerate()
        .filter(|(_, p)| inside(**p))
        .map(|(t, p)| (t, *p))
        .collect();
    let t_o = samples.len();
    if t_o <= 1 {
        let n = goals.positions.len() as f64;
        let mut diff = 0.0;
        for (g, &pg) in goals.prior.iter().enumerate() {
            if g != true_goal {
                diff += (goals.prior[true_goal] - pg).abs();
            }
        }
        return (0.0, 0.0, 1.0 - diff / n);
    }
    let mut den = 0.0;
    let mut leg = 0.0;
    let mut dec = 0.0;
    let mut amb = 0.0;
    let n = goals.positions.len() as f64;
    for j in 0..t_o {
        let p = oracle_visible_posterior(&samples[..=j], goals, total, beta);
        let w = (t_o - 1 - j) as f64;
        den += w;
        leg += p[true_goal] * w;
        dec += p[decoy] * w;
        let mut diff = 0.0;
        for (g, &pg) in p.iter().enumerate() {
            if g != true_goal {
                diff += (p[true_goal] - pg).abs();
            }
        }
        amb += (1.0 - diff / n) * w;
    }
    (leg / den, dec / den, amb / den)
}

/// All monotone lattice trajectories from `from` to `to` in exactly `steps`
/// steps (each step non-negative in both coordinates, any length).
pub fn monotone_lattice_trajectories(
    from: (i64, i64),
    to: (i64, i64),
    steps: usize,
) -> Vec<Vec<(f64, f64)>> {
    let mut out = Vec::new();
    let mut acc = vec![(from.0 as f64, from.1 as f64)];
    fn rec(
        at: (i64, i64),
        to: (i64, i64),
        steps_left: usize,
        acc: &mut Vec<(f64, f64)>,
        out: &mut Vec<Vec<(f64, f64)>>,
    ) {
        if steps_left == 0 {
            if at == to {
                out.push(acc.clone());
            }
            return;
        }
        for dx in 0..=(to.0 - at.0) {
            for dy in 0..=(to.1 - at.1) {
                let next = (at.0 + dx, at.1 + dy);
                acc.push((next.0 as f64, next.1 as f64));
                rec(next, to, steps_left - 1, acc, out);
                acc.pop();
            }
        }
    }
    rec(from, to, steps, &mut acc, &mut out);
    out
}

pub fn to_trajectory(points: &[(f64, f64)]) -> Trajectory<f64> {
    Trajectory::new(points.iter().map(|&(x, y)| Point2::new(x, y)).collect()).unwrap()
}

/// Load a shipped scenario file from the workspace `scenarios/` directory.
pub fn load_scenario(name: &str) -> dubious::ScenarioF64 {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name);
    let text = std::fs::read_to_string(&path)
        .unwrap_or_else(|e| panic!("reading {}: {e}", path.display()));
    dubious::scenario::parse_scenario(&text)
        .unwrap_or_else(|e| panic!("parsing {}: {e}", path.display()))
}

pub fn scenario_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}
