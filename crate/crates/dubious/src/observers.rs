//! Observers: motive, visibility region, visible-trace extraction, the
//! limited-observability posterior, per-timestep belief traces, and the
//! confident-guess rule.
//!
//! When the agent leaves a region and re-enters, the observer charges only
//! the cost of motion it actually saw (per-segment costs) and keeps its
//! normalizing anchor at the first sighting. While the agent is out of view
//! the belief freezes at the last visible posterior (the prior before any
//! sighting), so a belief exists at every timestep.

use serde::{Deserialize, Serialize};

use crate::geometry::{ConvexPolygon, Point2};
use crate::legibility::{
    path_cost, posterior_from_observation, GoalPosterior, GoalSet, InferenceConfig, Observation,
    Trajectory,
};
use crate::scalar::Real;
use crate::{Error, Result};

/// Identifier of an observer; report rows are keyed by it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObserverId(String);

impl ObserverId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for ObserverId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ObserverId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// An observer: a motive in `[-1, 1]` and a convex visibility region.
/// Observers with negative motive are adversarial; the motive magnitude
/// weights the observer's term in the planning objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Observer<T> {
    id: ObserverId,
    motive: T,
    region: ConvexPolygon<T>,
}

impl<T: Real> Observer<T> {
    pub fn new(id: ObserverId, motive: T, region: ConvexPolygon<T>) -> Result<Self> {
        if !(motive >= -T::one() && motive <= T::one()) {
            return Err(Error::invalid(
                format!("observer `{id}`.motive"),
                "motive must lie in [-1, 1]",
            ));
        }
        Ok(Self { id, motive, region })
    }

    pub fn id(&self) -> &ObserverId {
        &self.id
    }

    pub fn motive(&self) -> T {
        self.motive
    }

    pub fn region(&self) -> &ConvexPolygon<T> {
        &self.region
    }

    pub fn is_negative(&self) -> bool {
        self.motive < T::zero()
    }

    pub fn sees(&self, p: &Point2<T>) -> bool {
        self.region.contains(p)
    }
}

/// The waypoints of a trajectory prefix that lie inside an observer's region,
/// with their original timestep indices. Indices may have gaps; a maximal run
/// of consecutive indices forms a segment.
#[derive(Debug, Clone, PartialEq)]
pub struct VisibleTrace<T> {
    samples: Vec<(usize, Point2<T>)>,
}

impl<T: Real> VisibleTrace<T> {
    pub fn samples(&self) -> &[(usize, Point2<T>)] {
        &self.samples
    }

    /// Number of visible timesteps.
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&(usize, Point2<T>)> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&(usize, Point2<T>)> {
        self.samples.last()
    }

    /// Maximal runs of consecutive timestep indices.
    pub fn segments(&self) -> impl Iterator<Item = &[(usize, Point2<T>)]> {
        SegmentIter {
            rest: &self.samples,
        }
    }
}

struct SegmentIter<'a, T> {
    rest: &'a [(usize, Point2<T>)],
}

impl<'a, T> Iterator for SegmentIter<'a, T> {
    type Item = &'a [(usize, Point2<T>)];

    fn next(&mut self) -> Option<Self::Item> {
        if self.rest.is_empty() {
            return None;
        }
        let mut end = 1;
        while end < self.rest.len() && self.rest[end].0 == self.rest[end - 1].0 + 1 {
            end += 1;
        }
        let (seg, rest) = self.rest.split_at(end);
        self.rest = rest;
        Some(seg)
    }
}

/// Extract the waypoints of the prefix `0..=upto` that the observer can see,
/// preserving order and original indices.
pub fn visible_trace<T: Real>(
    traj: &Trajectory<T>,
    obs: &Observer<T>,
    upto: usize,
) -> VisibleTrace<T> {
    assert!(upto <= traj.steps(), "upto extends past the trajectory");
    let samples = traj
        .prefix(upto)
        .iter()
        .enumerate()
        .filter(|(_, p)| obs.sees(p))
        .map(|(t, p)| (t, *p))
        .collect();
    VisibleTrace { samples }
}

/// Posterior from a visible trace. The observed cost sums per-segment path
/// costs (no cost is charged for unseen travel between segments) and the
/// anchor is the first sighting. An empty trace returns the prior.
pub fn observed_posterior<T: Real>(
    trace: &VisibleTrace<T>,
    goals: &GoalSet<T>,
    total_steps: usize,
    cfg: &InferenceConfig<T>,
) -> Result<GoalPosterior<T>> {
    let (first, last) = match (trace.first(), trace.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Ok(GoalPosterior::from_probs(goals.prior().to_vec())),
    };
    let mut cost = T::zero();
    for segment in trace.segments() {
        let pts: Vec<Point2<T>> = segment.iter().map(|(_, p)| *p).collect();
        cost += path_cost(&pts);
    }
    let obs = Observation {
        observed_cost: cost,
        anchor: first.1,
        anchor_step: first.0,
        latest: last.1,
        latest_step: last.0,
    };
    posterior_from_observation(&obs, goals, total_steps, cfg)
}

/// Per-timestep belief of one observer over a full trajectory, with the
/// visibility flag for each timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefTrace<T> {
    posteriors: Vec<GoalPosterior<T>>,
    visible: Vec<bool>,
}

impl<T: Real> BeliefTrace<T> {
    /// Assemble a trace from explicit per-timestep posteriors and visibility
    /// flags (used to evaluate recorded or synthetic beliefs).
    pub fn new(posteriors: Vec<GoalPosterior<T>>, visible: Vec<bool>) -> Result<Self> {
        if posteriors.is_empty() {
            return Err(Error::invalid("belief", "needs at least one timestep"));
        }
        if posteriors.len() != visible.len() {
            return Err(Error::invalid(
                "belief",
                format!(
                    "{} posteriors vs {} visibility flags",
                    posteriors.len(),
                    visible.len()
                ),
            ));
        }
        Ok(Self {
            posteriors,
            visible,
        })
    }

    /// Timestep count (`T + 1`).
    pub fn len(&self) -> usize {
        self.posteriors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.posteriors.is_empty()
    }

    pub fn posterior(&self, t: usize) -> &GoalPosterior<T> {
        &self.posteriors[t]
    }

    pub fn posteriors(&self) -> &[GoalPosterior<T>] {
        &self.posteriors
    }

    pub fn visible_at(&self, t: usize) -> bool {
        self.visible[t]
    }

    pub fn visibility(&self) -> &[bool] {
        &self.visible
    }
}

/// Everything one visibility sweep learns about a (trajectory, region) pair:
/// which timesteps are visible and the observed posterior at each visible
/// timestep. Shared by belief traces, visible-portion scores, and the
/// planning objective, and bit-identical to batch evaluation via
/// [`observed_posterior`] on the growing [`visible_trace`].
#[derive(Debug, Clone)]
pub(crate) struct VisibilitySweep<T> {
    /// Per timestep: the rank among visible timesteps, if visible.
    pub rank_at: Vec<Option<usize>>,
    /// Visible timestep indices, ascending.
    pub visible_indices: Vec<usize>,
    /// Posterior at each visible rank.
    pub posteriors: Vec<GoalPosterior<T>>,
}

impl<T: Real> VisibilitySweep<T> {
    pub fn visible_count(&self) -> usize {
        self.visible_indices.len()
    }
}

pub(crate) fn visibility_sweep<T: Real>(
    traj: &Trajectory<T>,
    region: &ConvexPolygon<T>,
    goals: &GoalSet<T>,
    cfg: &InferenceConfig<T>,
) -> Result<VisibilitySweep<T>> {
    let total = traj.steps();
    let pts = traj.waypoints();

    let mut rank_at = Vec::with_capacity(total + 1);
    let mut visible_indices = Vec::new();
    let mut posteriors = Vec::new();

    // Per-segment cost accumulation mirrors observed_posterior exactly:
    // within a segment costs accumulate left to right, and the total is the
    // left fold over segment subtotals.
    let mut segment_costs: Vec<T> = Vec::new();
    let mut anchor: Option<(usize, Point2<T>)> = None;
    let mut prev_visible = false;

    for (t, p) in pts.iter().enumerate() {
        if !region.contains(p) {
            rank_at.push(None);
            prev_visible = false;
            continue;
        }
        if prev_visible {
            let last = segment_costs.last_mut().expect("open segment exists");
            *last += T::half() * pts[t - 1].distance_squared(p);
        } else {
            segment_costs.push(T::zero());
        }
        let (anchor_step, anchor_point) = *anchor.get_or_insert((t, *p));
        let cost = segment_costs.iter().fold(T::zero(), |acc, &c| acc + c);
        let obs = Observation {
            observed_cost: cost,
            anchor: anchor_point,
            anchor_step,
            latest: *p,
            latest_step: t,
        };
        posteriors.push(posterior_from_observation(&obs, goals, total, cfg)?);
        rank_at.push(Some(visible_indices.len()));
        visible_indices.push(t);
        prev_visible = true;
    }

    Ok(VisibilitySweep {
        rank_at,
        visible_indices,
        posteriors,
    })
}

/// Belief trace of one observer: at visible timesteps the posterior of the
/// visible trace so far; elsewhere the previous belief carried forward, with
/// the prior before the first sighting.
pub fn belief_trace<T: Real>(
    traj: &Trajectory<T>,
    obs: &Observer<T>,
    goals: &GoalSet<T>,
    cfg: &InferenceConfig<T>,
) -> Result<BeliefTrace<T>> {
    let sweep = visibility_sweep(traj, obs.region(), goals, cfg)?;
    let mut posteriors = Vec::with_capacity(sweep.rank_at.len());
    let mut current = GoalPosterior::from_probs(goals.prior().to_vec());
    let mut visible = Vec::with_capacity(sweep.rank_at.len());
    for rank in &sweep.rank_at {
        if let Some(j) = rank {
            current = sweep.posteriors[*j].clone();
        }
        posteriors.push(current.clone());
        visible.push(rank.is_some());
    }
    Ok(BeliefTrace {
        posteriors,
        visible,
    })
}

/// The observer's guess: the argmax goal if it leads every other goal's
/// probability by at least `margin` (ties broken toward the lowest goal id),
/// otherwise `None`. Comparison uses `>=`, so exactly-margin separation
/// counts as confident.
pub fn confident_guess<T: Real>(
    post: &GoalPosterior<T>,
    goals: &GoalSet<T>,
    margin: T,
) -> Option<usize> {
    debug_assert_eq!(post.len(), goals.len());
    let mut best = 0;
    for i in 1..post.len() {
        if post.prob(i) > post.prob(best)
            || (post.prob(i) == post.prob(best) && goals.id(i) < goals.id(best))
        {
            best = i;
        }
    }
    let confident = (0..post.len())
        .filter(|&i| i != best)
        .all(|i| post.prob(best) >= post.prob(i) + margin);
    confident.then_some(best)
}
