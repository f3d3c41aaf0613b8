//! The planner's per-timestep cost: a motive-weighted legibility term over
//! positive observers plus a decoy/avoidance term over negative observers,
//! normalized by the total motive mass that can currently see the agent and
//! sign-flipped for minimization.
//!
//! Each observer scores only the portion of the trajectory inside its region,
//! with visible-time weighting: a visible sample's weight is the number of
//! visible samples after it, mirroring the `(T - t)` weighting restricted to
//! visible time. Visibility membership (and with it the observer's visible
//! step count) is recomputed for every candidate trajectory, since rollouts
//! deform in and out of regions. Waypoints no observer sees cost exactly zero.

use serde::{Deserialize, Serialize};

use crate::legibility::{GoalId, GoalSet, InferenceConfig, Trajectory};
use crate::observers::{visibility_sweep, Observer};
use crate::scalar::Real;
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Strategy and inference parameters of the planning objective.
///
/// `alpha_neg` selects the negative-observer strategy: `+1` rewards apparent
/// legibility toward the decoy goal, `-1` makes visibility by negative
/// observers costly (avoidance). `decoy_goal` may be `None` only in
/// scenarios without negative observers (e.g. a single-goal scene).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound(
    deserialize = "T: Real + serde::Deserialize<'de>",
    serialize = "T: serde::Serialize"
))]
pub struct ObjectiveConfig<T> {
    pub alpha_neg: i8,
    pub decoy_goal: Option<GoalId>,
    pub inference: InferenceConfig<T>,
}

impl<T: Real> Default for ObjectiveConfig<T> {
    fn default() -> Self {
        Self {
            alpha_neg: 1,
            decoy_goal: None,
            inference: InferenceConfig::default(),
        }
    }
}

impl<T: Real> ObjectiveConfig<T> {
    pub(crate) fn validate(&self, path: &str) -> Result<()> {
        if self.alpha_neg != 1 && self.alpha_neg != -1 {
            return Err(Error::invalid(
                format!("{path}.alpha_neg"),
                "alpha_neg must be +1 or -1",
            ));
        }
        self.inference.validate(&format!("{path}.inference"))
    }

    pub fn alpha(&self) -> T {
        T::from_f64_lossy(self.alpha_neg as f64)
    }
}

/// Per-timestep cost of a trajectory, length `T + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostVector<T> {
    values: Vec<T>,
}

impl<T: Real> CostVector<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Total cost, the quantity the optimizer minimizes.
    pub fn total(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, &v| acc + v)
    }
}

/// One observer's cached view of one candidate trajectory: visibility ranks
/// plus running weighted sums of the goal posteriors over visible time.
pub(crate) struct ObserverTimeline<T> {
    motive: T,
    rank_at: Vec<Option<usize>>,
    /// `sum_j (T_o - 1 - j)`; zero when the observer saw at most one sample.
    weight_total: T,
    /// Cumulative `P(G_R | seen-so-far) * weight` by rank.
    true_cumulative: Vec<T>,
    /// Same for the decoy goal, when one exists.
    decoy_cumulative: Vec<T>,
}

impl<T: Real> ObserverTimeline<T> {
    pub(crate) fn build(
        traj: &Trajectory<T>,
        observer: &Observer<T>,
        goals: &GoalSet<T>,
        true_index: usize,
        decoy_index: Option<usize>,
        cfg: &InferenceConfig<T>,
    ) -> Result<Self> {
        let sweep = visibility_sweep(traj, observer.region(), goals, cfg)?;
        let visible = sweep.visible_count();

        let mut true_cumulative = Vec::with_capacity(visible);
        let mut decoy_cumulative = Vec::with_capacity(visible);
        let mut true_acc = T::zero();
        let mut decoy_acc = T::zero();
        for (j, post) in sweep.posteriors.iter().enumerate() {
            let w = T::from_usize_lossy(visible - 1 - j);
            true_acc += post.prob(true_index) * w;
            true_cumulative.push(true_acc);
            if let Some(d) = decoy_index {
                decoy_acc += post.prob(d) * w;
            }
            decoy_cumulative.push(decoy_acc);
        }
        let weight_total = T::from_usize_lossy(visible * visible.saturating_sub(1) / 2);

        Ok(Self {
            motive: observer.motive(),
            rank_at: sweep.rank_at,
            weight_total,
            true_cumulative,
            decoy_cumulative,
        })
    }

    fn rank(&self, timestep: usize) -> Option<usize> {
        self.rank_at[timestep]
    }

    /// Visible-portion legibility partial sum through rank `j`, normalized by
    /// the full visible-time weight. Zero when all weights vanish.
    fn legibility_partial(&self, j: usize) -> T {
        if self.weight_total == T::zero() {
            T::zero()
        } else {
            self.true_cumulative[j] / self.weight_total
        }
    }

    fn decoy_partial(&self, j: usize) -> T {
        if self.weight_total == T::zero() {
            T::zero()
        } else {
            self.decoy_cumulative[j] / self.weight_total
        }
    }
}

fn decoy_index_for<T: Real>(
    goals: &GoalSet<T>,
    observers: &[Observer<T>],
    cfg: &ObjectiveConfig<T>,
) -> Result<Option<usize>> {
    match &cfg.decoy_goal {
        Some(id) => Ok(Some(goals.require(id)?)),
        None => {
            if observers.iter().any(|o| o.is_negative()) {
                Err(Error::invalid(
                    "objective.decoy_goal",
                    "a decoy goal is required when negative observers are present",
                ))
            } else {
                Ok(None)
            }
        }
    }
}

fn build_timelines<T: Real>(
    traj: &Trajectory<T>,
    observers: &[Observer<T>],
    goals: &GoalSet<T>,
    true_goal: &GoalId,
    cfg: &ObjectiveConfig<T>,
) -> Result<Vec<ObserverTimeline<T>>> {
    let true_index = goals.require(true_goal)?;
    let decoy_index = decoy_index_for(goals, observers, cfg)?;
    observers
        .iter()
        .map(|o| ObserverTimeline::build(traj, o, goals, true_index, decoy_index, &cfg.inference))
        .collect()
}

fn f_pos_from<T: Real>(timelines: &[ObserverTimeline<T>], i: usize) -> T {
    let mut acc = T::zero();
    for tl in timelines {
        if tl.motive >= T::zero() {
            if let Some(j) = tl.rank(i) {
                acc += tl.motive * tl.legibility_partial(j);
            }
        }
    }
    acc
}

fn f_neg_from<T: Real>(timelines: &[ObserverTimeline<T>], i: usize, alpha: T) -> T {
    let mut acc = T::zero();
    for tl in timelines {
        if tl.motive < T::zero() {
            if let Some(j) = tl.rank(i) {
                acc += alpha * tl.motive.abs() * tl.decoy_partial(j);
            }
        }
    }
    acc
}

fn cost_from<T: Real>(timelines: &[ObserverTimeline<T>], i: usize, alpha: T) -> T {
    let mut mass = T::zero();
    for tl in timelines {
        if tl.rank(i).is_some() {
            mass += tl.motive.abs();
        }
    }
    if mass == T::zero() {
        return T::zero();
    }
    -(f_pos_from(timelines, i) + f_neg_from(timelines, i, alpha)) / mass
}

/// Positive-observer term at timestep `i`: the sum over positive observers
/// that can see `q_i` of `motive * visible-portion legibility partial sum`.
pub fn f_pos<T: Real>(
    i: usize,
    traj: &Trajectory<T>,
    observers: &[Observer<T>],
    goals: &GoalSet<T>,
    true_goal: &GoalId,
    cfg: &InferenceConfig<T>,
) -> Result<T> {
    assert!(i <= traj.steps(), "timestep out of range");
    let true_index = goals.require(true_goal)?;
    let timelines: Vec<_> = observers
        .iter()
        .map(|o| ObserverTimeline::build(traj, o, goals, true_index, None, cfg))
        .collect::<Result<_>>()?;
    Ok(f_pos_from(&timelines, i))
}

/// Negative-observer term at timestep `i`: the sum over negative observers
/// that can see `q_i` of `alpha_neg * |motive| * decoy partial sum`.
pub fn f_neg<T: Real>(
    i: usize,
    traj: &Trajectory<T>,
    observers: &[Observer<T>],
    goals: &GoalSet<T>,
    true_goal: &GoalId,
    cfg: &ObjectiveConfig<T>,
) -> Result<T> {
    assert!(i <= traj.steps(), "timestep out of range");
    let timelines = build_timelines(traj, observers, goals, true_goal, cfg)?;
    Ok(f_neg_from(&timelines, i, cfg.alpha()))
}

/// Full per-timestep cost: zero when nobody (with nonzero motive) sees `q_i`,
/// otherwise `-(f_pos + f_neg)` divided by the visible motive mass.
pub fn per_timestep_cost<T: Real>(
    i: usize,
    traj: &Trajectory<T>,
    observers: &[Observer<T>],
    goals: &GoalSet<T>,
    true_goal: &GoalId,
    cfg: &ObjectiveConfig<T>,
) -> Result<T> {
    assert!(i <= traj.steps(), "timestep out of range");
    let timelines = build_timelines(traj, observers, goals, true_goal, cfg)?;
    Ok(cost_from(&timelines, i, cfg.alpha()))
}

/// Per-timestep costs of a whole trajectory under a scenario's objective.
/// Observer visibility and posteriors are evaluated once per observer, so the
/// sweep is linear in trajectory length.
pub fn cost_vector<T: Real>(traj: &Trajectory<T>, scenario: &Scenario<T>) -> Result<CostVector<T>> {
    let timelines = build_timelines(
        traj,
        &scenario.observers,
        &scenario.goals,
        &scenario.true_goal,
        &scenario.objective,
    )?;
    let alpha = scenario.objective.alpha();
    let values = (0..=traj.steps())
        .map(|i| cost_from(&timelines, i, alpha))
        .collect();
    Ok(CostVector { values })
}
