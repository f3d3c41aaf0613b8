//! Reference trajectory generators: the efficient straight line, the
//! maximally legible trajectory, and the maximally decoy-legible trajectory,
//! the latter two computed under an assumed single full-visibility observer.
//! Baselines reuse the same optimizer and iteration budget as regular runs so
//! comparisons are budget-fair.

use rand_distr::{Distribution, StandardNormal};

use crate::geometry::Point2;
use crate::legibility::Trajectory;
use crate::observers::{Observer, ObserverId};
use crate::scalar::Real;
use crate::scenario::Scenario;
use crate::stomp::{optimize, StompConfig};
use crate::Result;

/// The straight line from `start` to `goal` in `steps` equal steps: the
/// minimum-cost (most predictable) trajectory. Endpoints are exact.
pub fn efficient_trajectory<T: Real>(
    start: Point2<T>,
    goal: Point2<T>,
    steps: usize,
) -> Trajectory<T> {
    assert!(steps >= 1, "a trajectory needs at least one step");
    let mut pts = Vec::with_capacity(steps + 1);
    pts.push(start);
    for k in 1..steps {
        pts.push(start.lerp(&goal, T::from_usize_lossy(k) / T::from_usize_lossy(steps)));
    }
    pts.push(goal);
    Trajectory::new(pts).expect("straight line between finite points is valid")
}

fn with_single_observer<T: Real>(scenario: &Scenario<T>, motive: T) -> Scenario<T> {
    let mut derived = scenario.clone();
    derived.observers = vec![Observer::new(
        ObserverId::new("full-view"),
        motive,
        scenario.bounds.as_polygon(),
    )
    .expect("unit motive with a valid region")];
    derived
}

/// Maximally legible trajectory: optimize against a single `+1` observer
/// that sees the whole workspace.
pub fn max_legible_baseline<T>(scenario: &Scenario<T>, cfg: &StompConfig<T>) -> Result<Trajectory<T>>
where
    T: Real + Send + Sync,
    StandardNormal: Distribution<T>,
{
    let derived = with_single_observer(scenario, T::one());
    Ok(optimize(&derived, cfg)?.best_trajectory)
}

/// Maximally decoy-legible trajectory: optimize against a single `-1`
/// observer that sees the whole workspace, with the decoy strategy selected.
pub fn max_decoy_baseline<T>(scenario: &Scenario<T>, cfg: &StompConfig<T>) -> Result<Trajectory<T>>
where
    T: Real + Send + Sync,
    StandardNormal: Distribution<T>,
{
    let mut derived = with_single_observer(scenario, -T::one());
    derived.objective.alpha_neg = 1;
    Ok(optimize(&derived, cfg)?.best_trajectory)
}
