//! Evaluation of trajectories against scenarios: per-observer earliest
//! confident correct guess, percent correct after the first, and the three
//! score functionals restricted to each observer's visible trace.
//!
//! "Never" (no confident correct guess) and "n/a" are explicit `None` states,
//! rendered as `---` in tables, never sentinel numbers.

use crate::legibility::{ambiguity_integrand, ambiguous_scale, GoalPosterior, InferenceConfig};
use crate::observers::{
    belief_trace, confident_guess, visibility_sweep, BeliefTrace, Observer, ObserverId,
};
use crate::legibility::{GoalId, Trajectory};
use crate::scalar::Real;
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Metrics of one observer for one trajectory. Percentages are in `[0, 100]`.
/// `earliest_correct_pct` is `None` iff no timestep has a confident correct
/// guess, and exactly then `pct_correct_after_first` is `None`. Scores are
/// `None` where not applicable (legibility for negative observers,
/// illegibility for positive ones).
#[derive(Debug, Clone, PartialEq)]
pub struct ObserverMetrics<T> {
    pub earliest_correct_pct: Option<T>,
    pub pct_correct_after_first: Option<T>,
    pub legibility: Option<T>,
    pub illeg_decoy: Option<T>,
    pub illeg_ambiguous: Option<T>,
}

/// Metrics of one labeled trajectory, one row per scenario observer in
/// scenario order.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport<T> {
    pub label: String,
    pub rows: Vec<(ObserverId, ObserverMetrics<T>)>,
}

/// Earliest timestep with a confident correct guess, as a percentage of the
/// trajectory (`100 * t / T`), or `None` when no timestep qualifies.
pub fn earliest_correct<T: Real>(
    belief: &BeliefTrace<T>,
    scenario: &Scenario<T>,
    true_goal: &GoalId,
    margin: T,
) -> Result<Option<T>> {
    let true_index = scenario.goals.require(true_goal)?;
    let total = belief.len() - 1;
    for t in 0..=total {
        if confident_guess(belief.posterior(t), &scenario.goals, margin) == Some(true_index) {
            let pct = T::from_usize_lossy(100) * T::from_usize_lossy(t)
                / T::from_usize_lossy(total.max(1));
            return Ok(Some(pct));
        }
    }
    Ok(None)
}

/// Among the timesteps from the first confident correct guess through the
/// end, the percentage with a confident correct guess. `None` when there is
/// no first correct guess.
pub fn pct_correct_after_first<T: Real>(
    belief: &BeliefTrace<T>,
    scenario: &Scenario<T>,
    true_goal: &GoalId,
    margin: T,
) -> Result<Option<T>> {
    let true_index = scenario.goals.require(true_goal)?;
    let total = belief.len() - 1;
    let correct_at = |t: usize| {
        confident_guess(belief.posterior(t), &scenario.goals, margin) == Some(true_index)
    };
    let Some(first) = (0..=total).find(|&t| correct_at(t)) else {
        return Ok(None);
    };
    let window = total - first + 1;
    let correct = (first..=total).filter(|&t| correct_at(t)).count();
    Ok(Some(
        T::from_usize_lossy(100) * T::from_usize_lossy(correct) / T::from_usize_lossy(window),
    ))
}

/// The three score functionals restricted to the observer's visible trace,
/// returned as (legibility, decoy, ambiguous). Weighting over visible time
/// matches the planning objective, so the optimized quantity and the
/// reported quantity coincide. An observer that saw at most one sample
/// scores 0 legibility and 0 decoy, and the prior-only ambiguity.
pub fn observer_scores<T: Real>(
    traj: &Trajectory<T>,
    obs: &Observer<T>,
    scenario: &Scenario<T>,
    cfg: &InferenceConfig<T>,
) -> Result<(T, T, T)> {
    let goals = &scenario.goals;
    let true_index = goals.require(&scenario.true_goal)?;
    let decoy_index = match &scenario.objective.decoy_goal {
        Some(id) => Some(goals.require(id)?),
        None => None,
    };
    let scale = ambiguous_scale(goals.len(), cfg);

    let sweep = visibility_sweep(traj, obs.region(), goals, cfg)?;
    let visible = sweep.visible_count();
    if visible <= 1 {
        let prior = GoalPosterior::from_probs(goals.prior().to_vec());
        let ambiguous = ambiguity_integrand(&prior, true_index) * scale;
        return Ok((T::zero(), T::zero(), ambiguous));
    }

    let mut weight_sum = T::zero();
    let mut leg = T::zero();
    let mut decoy = T::zero();
    let mut ambiguous = T::zero();
    for (j, post) in sweep.posteriors.iter().enumerate() {
        let w = T::from_usize_lossy(visible - 1 - j);
        weight_sum += w;
        leg += post.prob(true_index) * w;
        if let Some(d) = decoy_index {
            decoy += post.prob(d) * w;
        }
        ambiguous += ambiguity_integrand(post, true_index) * w;
    }
    Ok((
        leg / weight_sum,
        decoy / weight_sum,
        ambiguous / weight_sum * scale,
    ))
}

/// Evaluate labeled trajectories against a scenario: one report per
/// trajectory, one row per observer. Positive observers get the legibility
/// column, negative observers the two illegibility columns.
pub fn build_report<T: Real>(
    scenario: &Scenario<T>,
    labeled: &[(String, Trajectory<T>)],
) -> Result<Vec<MetricsReport<T>>> {
    let cfg = &scenario.objective.inference;
    let margin = cfg.margin;
    let mut reports = Vec::with_capacity(labeled.len());
    for (label, traj) in labeled {
        if traj.steps() != scenario.trajectory_steps {
            return Err(Error::invalid(
                format!("trajectory `{label}`"),
                format!(
                    "has {} steps but the scenario expects {}",
                    traj.steps(),
                    scenario.trajectory_steps
                ),
            ));
        }
        let mut rows = Vec::with_capacity(scenario.observers.len());
        for obs in &scenario.observers {
            let belief = belief_trace(traj, obs, &scenario.goals, cfg)?;
            let earliest = earliest_correct(&belief, scenario, &scenario.true_goal, margin)?;
            let pct = pct_correct_after_first(&belief, scenario, &scenario.true_goal, margin)?;
            let (leg, decoy, ambiguous) = observer_scores(traj, obs, scenario, cfg)?;
            let metrics = if obs.is_negative() {
                ObserverMetrics {
                    earliest_correct_pct: earliest,
                    pct_correct_after_first: pct,
                    legibility: None,
                    illeg_decoy: Some(decoy),
                    illeg_ambiguous: Some(ambiguous),
                }
            } else {
                ObserverMetrics {
                    earliest_correct_pct: earliest,
                    pct_correct_after_first: pct,
                    legibility: Some(leg),
                    illeg_decoy: None,
                    illeg_ambiguous: None,
                }
            };
            rows.push((obs.id().clone(), metrics));
        }
        reports.push(MetricsReport {
            label: label.clone(),
            rows,
        });
    }
    Ok(reports)
}
