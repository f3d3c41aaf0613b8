//! The scoring core: quadratic path cost, straight-line optimal cost, the
//! Bayesian goal posterior over trajectory prefixes, and the trajectory-level
//! score functionals for legibility and the two illegibility strategies.
//!
//! All integrals are discretized as sums over waypoint indices with weight
//! `(T - t)`, so the final waypoint (which always reveals the goal) carries
//! zero weight. Posteriors use softmax weights
//! `exp(-beta * (C(prefix) + C*_G(Q) - C*_G(anchor))) * P(G)`, stabilized by
//! subtracting the largest exponent before exponentiation. The likelihood's
//! proportionality constant cancels in normalization; `beta` (the
//! temperature) controls posterior sharpness on top of that.

use serde::{Deserialize, Serialize};

use crate::geometry::Point2;
use crate::scalar::Real;
use crate::{Error, Result};

/// Identifier of a candidate goal. Ordering (lexicographic) breaks argmax
/// ties deterministically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GoalId(String);

impl GoalId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for GoalId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for GoalId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Fixed-length waypoint sequence with unit timestep. A trajectory with
/// waypoints `0..=T` has `T` steps; optimized trajectories keep waypoint 0 at
/// the start and waypoint `T` at the true goal.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<T> {
    waypoints: Vec<Point2<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(waypoints: Vec<Point2<T>>) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::TrajectoryTooShort {
                min: 2,
                got: waypoints.len(),
            });
        }
        for (i, w) in waypoints.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::invalid(
                    format!("trajectory[{i}]"),
                    "waypoint coordinates must be finite",
                ));
            }
        }
        Ok(Self { waypoints })
    }

    pub fn waypoints(&self) -> &[Point2<T>] {
        &self.waypoints
    }

    /// Number of steps `T` (one less than the waypoint count).
    pub fn steps(&self) -> usize {
        self.waypoints.len() - 1
    }

    pub fn start(&self) -> Point2<T> {
        self.waypoints[0]
    }

    pub fn end(&self) -> Point2<T> {
        *self.waypoints.last().expect("non-empty by construction")
    }

    /// Waypoints `0..=t`.
    pub fn prefix(&self, t: usize) -> &[Point2<T>] {
        &self.waypoints[..=t]
    }

    /// Total Euclidean length, `sum(|q_{i+1} - q_i|)`.
    pub fn path_length(&self) -> T {
        self.waypoints
            .windows(2)
            .fold(T::zero(), |acc, w| acc + w[0].distance(&w[1]))
    }
}

/// Candidate goals with a prior distribution. The default prior is uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalSet<T> {
    goals: Vec<(GoalId, Point2<T>)>,
    prior: Vec<T>,
}

impl<T: Real> GoalSet<T> {
    pub fn new(goals: Vec<(GoalId, Point2<T>)>) -> Result<Self> {
        let n = goals.len();
        if n == 0 {
            return Err(Error::invalid("goals", "at least one goal is required"));
        }
        let uniform = T::one() / T::from_usize_lossy(n);
        Self::with_prior(goals, vec![uniform; n])
    }

    pub fn with_prior(goals: Vec<(GoalId, Point2<T>)>, prior: Vec<T>) -> Result<Self> {
        let n = goals.len();
        if n == 0 {
            return Err(Error::invalid("goals", "at least one goal is required"));
        }
        if prior.len() != n {
            return Err(Error::invalid(
                "goals",
                format!("prior has {} entries for {} goals", prior.len(), n),
            ));
        }
        for (i, (id, p)) in goals.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::invalid(
                    format!("goals[{i}].position"),
                    "coordinates must be finite",
                ));
            }
            if goals[..i].iter().any(|(other, _)| other == id) {
                return Err(Error::invalid(
                    format!("goals[{i}].id"),
                    format!("duplicate goal id `{id}`"),
                ));
            }
        }
        let mut sum = T::zero();
        for (i, &w) in prior.iter().enumerate() {
            if !(w >= T::zero() && w <= T::one()) {
                return Err(Error::invalid(
                    format!("goals[{i}].prior"),
                    "prior must lie in [0, 1]",
                ));
            }
            sum += w;
        }
        // 1e-9 for f64; widen for narrower scalar types.
        let tol = T::from_f64_lossy(1e-9).max(T::epsilon() * T::from_usize_lossy(32 * n));
        if (sum - T::one()).abs() > tol {
            return Err(Error::invalid(
                "goals",
                format!("prior sums to {sum}, expected 1"),
            ));
        }
        Ok(Self { goals, prior })
    }

    pub fn len(&self) -> usize {
        self.goals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.goals.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(GoalId, Point2<T>)> {
        self.goals.iter()
    }

    pub fn id(&self, index: usize) -> &GoalId {
        &self.goals[index].0
    }

    pub fn position(&self, index: usize) -> Point2<T> {
        self.goals[index].1
    }

    pub fn prior(&self) -> &[T] {
        &self.prior
    }

    pub fn index_of(&self, id: &GoalId) -> Option<usize> {
        self.goals.iter().position(|(g, _)| g == id)
    }

    /// Index lookup that reports an `UnknownGoal` error.
    pub fn require(&self, id: &GoalId) -> Result<usize> {
        self.index_of(id)
            .ok_or_else(|| Error::UnknownGoal(id.as_str().to_owned()))
    }
}

/// Per-goal probabilities aligned with the owning [`GoalSet`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct GoalPosterior<T> {
    probs: Vec<T>,
}

impl<T: Real> GoalPosterior<T> {
    pub(crate) fn from_probs(probs: Vec<T>) -> Self {
        Self { probs }
    }

    /// Build a posterior from explicit probabilities. Each must lie in
    /// `[0, 1]` and they must sum to one (up to a small tolerance).
    pub fn new(probs: Vec<T>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::invalid("posterior", "needs at least one goal"));
        }
        let mut sum = T::zero();
        for &p in &probs {
            if !(p >= T::zero() && p <= T::one()) {
                return Err(Error::invalid("posterior", "probabilities must lie in [0, 1]"));
            }
            sum += p;
        }
        let tol = T::from_f64_lossy(1e-9).max(T::epsilon() * T::from_usize_lossy(32 * probs.len()));
        if (sum - T::one()).abs() > tol {
            return Err(Error::invalid(
                "posterior",
                format!("probabilities sum to {sum}, expected 1"),
            ));
        }
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn prob(&self, goal_index: usize) -> T {
        self.probs[goal_index]
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Posterior and guessing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound(
    deserialize = "T: Real + serde::Deserialize<'de>",
    serialize = "T: serde::Serialize"
))]
pub struct InferenceConfig<T> {
    /// Temperature `beta` multiplying every exponent argument; larger values
    /// sharpen posteriors.
    pub temperature: T,
    /// Confidence margin for guesses: the argmax goal must lead every other
    /// goal's probability by at least this much.
    pub margin: T,
    /// Divide the ambiguous score by the goal count, matching the reporting
    /// convention where a never-seen observer with `n` goals scores `1/n`.
    pub ambiguous_table_scaling: bool,
}

impl<T: Real> Default for InferenceConfig<T> {
    fn default() -> Self {
        Self {
            temperature: T::one(),
            margin: T::from_f64_lossy(0.05),
            ambiguous_table_scaling: false,
        }
    }
}

impl<T: Real> InferenceConfig<T> {
    pub(crate) fn validate(&self, path: &str) -> Result<()> {
        if !(self.temperature > T::zero() && self.temperature.is_finite()) {
            return Err(Error::invalid(
                format!("{path}.temperature"),
                "temperature must be positive and finite",
            ));
        }
        if !(self.margin >= T::zero() && self.margin < T::one()) {
            return Err(Error::invalid(
                format!("{path}.margin"),
                "margin must lie in [0, 1)",
            ));
        }
        Ok(())
    }
}

/// Quadratic path cost `0.5 * sum(|q_{i+1} - q_i|^2)` with unit timestep.
/// A single point costs zero.
pub fn path_cost<T: Real>(segment: &[Point2<T>]) -> T {
    assert!(!segment.is_empty(), "path_cost needs at least one point");
    segment.windows(2).fold(T::zero(), |acc, w| {
        acc + T::half() * w[0].distance_squared(&w[1])
    })
}

/// Cost of the constant-velocity straight line from `from` to `goal` over
/// `steps_remaining` unit steps: `|goal - from|^2 / (2 * steps_remaining)`.
pub fn optimal_cost<T: Real>(from: Point2<T>, goal: Point2<T>, steps_remaining: usize) -> T {
    assert!(steps_remaining >= 1, "steps_remaining must be at least 1");
    from.distance_squared(&goal) / (T::two() * T::from_usize_lossy(steps_remaining))
}

/// One observation event feeding the posterior: accumulated observed cost
/// plus the anchor (first observed waypoint) and the most recent observed
/// waypoint, both with their original timesteps.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Observation<T> {
    pub observed_cost: T,
    pub anchor: Point2<T>,
    pub anchor_step: usize,
    pub latest: Point2<T>,
    pub latest_step: usize,
}

/// Softmax posterior for an observation. The exponent for goal `G` is
/// `-beta * (cost + C*_G(latest, T - t_latest) - C*_G(anchor, T - t_anchor))`
/// with remaining steps floored at one; weights are multiplied by the prior
/// and normalized after subtracting the maximum exponent.
pub(crate) fn posterior_from_observation<T: Real>(
    obs: &Observation<T>,
    goals: &GoalSet<T>,
    total_steps: usize,
    cfg: &InferenceConfig<T>,
) -> Result<GoalPosterior<T>> {
    let beta = cfg.temperature;
    let remaining_latest = (total_steps - obs.latest_step.min(total_steps)).max(1);
    let remaining_anchor = (total_steps - obs.anchor_step.min(total_steps)).max(1);

    let mut exponents = Vec::with_capacity(goals.len());
    let mut max_exp = T::neg_infinity();
    for (_, goal_pos) in goals.iter() {
        let to_go = optimal_cost(obs.latest, *goal_pos, remaining_latest);
        let from_anchor = optimal_cost(obs.anchor, *goal_pos, remaining_anchor);
        let e = -beta * (obs.observed_cost + to_go - from_anchor);
        if e > max_exp {
            max_exp = e;
        }
        exponents.push(e);
    }
    if !max_exp.is_finite() {
        return Err(Error::DegeneratePosterior);
    }

    let mut weights = Vec::with_capacity(goals.len());
    let mut sum = T::zero();
    for (e, &prior) in exponents.iter().zip(goals.prior()) {
        let w = (*e - max_exp).exp() * prior;
        sum += w;
        weights.push(w);
    }
    if !(sum > T::zero()) || !sum.is_finite() {
        return Err(Error::DegeneratePosterior);
    }
    for w in &mut weights {
        *w /= sum;
    }
    Ok(GoalPosterior::from_probs(weights))
}

/// Goal posterior given a trajectory prefix `q_0..=q_t` of a `total_steps`
/// trajectory. The prefix must start at the inference anchor (the start
/// position for unlimited observability).
pub fn goal_posterior<T: Real>(
    prefix: &[Point2<T>],
    goals: &GoalSet<T>,
    total_steps: usize,
    cfg: &InferenceConfig<T>,
) -> Result<GoalPosterior<T>> {
    assert!(!prefix.is_empty(), "prefix needs at least one point");
    assert!(total_steps >= 1, "total_steps must be at least 1");
    let t = prefix.len() - 1;
    assert!(t <= total_steps, "prefix extends past the trajectory");
    let obs = Observation {
        observed_cost: path_cost(prefix),
        anchor: prefix[0],
        anchor_step: 0,
        latest: prefix[t],
        latest_step: t,
    };
    posterior_from_observation(&obs, goals, total_steps, cfg)
}

/// Posterior of every prefix `0..=t` for `t` in `0..=T`, sharing the cost
/// accumulation so the whole sweep is linear in the trajectory length. Each
/// entry is bit-identical to calling [`goal_posterior`] on that prefix.
pub fn prefix_posteriors<T: Real>(
    traj: &Trajectory<T>,
    goals: &GoalSet<T>,
    cfg: &InferenceConfig<T>,
) -> Result<Vec<GoalPosterior<T>>> {
    let total = traj.steps();
    let pts = traj.waypoints();
    let mut out = Vec::with_capacity(total + 1);
    let mut cost = T::zero();
    for t in 0..=total {
        if t > 0 {
            cost += T::half() * pts[t - 1].distance_squared(&pts[t]);
        }
        let obs = Observation {
            observed_cost: cost,
            anchor: pts[0],
            anchor_step: 0,
            latest: pts[t],
            latest_step: t,
        };
        out.push(posterior_from_observation(&obs, goals, total, cfg)?);
    }
    Ok(out)
}

/// Time-weighted average of a per-timestep quantity with weight `(T - t)`.
fn time_weighted_average<T: Real>(values: impl Iterator<Item = T>, total_steps: usize) -> T {
    let mut num = T::zero();
    let mut den = T::zero();
    for (t, v) in values.enumerate() {
        let w = T::from_usize_lossy(total_steps - t);
        num += v * w;
        den += w;
    }
    num / den
}

/// Legibility: how early and confidently the trajectory reveals `true_goal`.
/// Discrete form of the time-weighted posterior average, in `[0, 1]`.
pub fn legibility_score<T: Real>(
    traj: &Trajectory<T>,
    goals: &GoalSet<T>,
    true_goal: &GoalId,
    cfg: &InferenceConfig<T>,
) -> Result<T> {
    let g = goals.require(true_goal)?;
    let posts = prefix_posteriors(traj, goals, cfg)?;
    Ok(time_weighted_average(
        posts.iter().map(|p| p.prob(g)),
        traj.steps(),
    ))
}

/// Decoy illegibility: the legibility score computed toward the decoy goal.
pub fn illegibility_decoy_score<T: Real>(
    traj: &Trajectory<T>,
    goals: &GoalSet<T>,
    decoy_goal: &GoalId,
    cfg: &InferenceConfig<T>,
) -> Result<T> {
    legibility_score(traj, goals, decoy_goal, cfg)
}

/// Per-timestep ambiguity integrand:
/// `1 - (1/n) * sum_{G != true} |P(true) - P(G)|`.
pub(crate) fn ambiguity_integrand<T: Real>(post: &GoalPosterior<T>, true_index: usize) -> T {
    let n = post.len();
    let inv_n = T::one() / T::from_usize_lossy(n);
    let p_true = post.prob(true_index);
    let mut acc = T::zero();
    for g in 0..n {
        if g != true_index {
            acc += (p_true - post.prob(g)).abs();
        }
    }
    T::one() - inv_n * acc
}

pub(crate) fn ambiguous_scale<T: Real>(goal_count: usize, cfg: &InferenceConfig<T>) -> T {
    if cfg.ambiguous_table_scaling {
        T::one() / T::from_usize_lossy(goal_count)
    } else {
        T::one()
    }
}

/// Ambiguous illegibility: time-weighted average of the ambiguity integrand.
/// With `ambiguous_table_scaling` the result is divided by the goal count.
pub fn illegibility_ambiguous_score<T: Real>(
    traj: &Trajectory<T>,
    goals: &GoalSet<T>,
    true_goal: &GoalId,
    cfg: &InferenceConfig<T>,
) -> Result<T> {
    if goals.len() < 2 {
        return Err(Error::invalid(
            "goals",
            "ambiguous score needs at least two goals",
        ));
    }
    let g = goals.require(true_goal)?;
    let posts = prefix_posteriors(traj, goals, cfg)?;
    let raw = time_weighted_average(
        posts.iter().map(|p| ambiguity_integrand(p, g)),
        traj.steps(),
    );
    Ok(raw * ambiguous_scale(goals.len(), cfg))
}

/// Illegibility: the better of the decoy and ambiguous strategies.
pub fn illegibility_score<T: Real>(
    traj: &Trajectory<T>,
    goals: &GoalSet<T>,
    true_goal: &GoalId,
    decoy_goal: &GoalId,
    cfg: &InferenceConfig<T>,
) -> Result<T> {
    if true_goal == decoy_goal {
        return Err(Error::DecoyEqualsTrueGoal(decoy_goal.as_str().to_owned()));
    }
    let decoy = illegibility_decoy_score(traj, goals, decoy_goal, cfg)?;
    let ambiguous = illegibility_ambiguous_score(traj, goals, true_goal, cfg)?;
    Ok(decoy.max(ambiguous))
}
