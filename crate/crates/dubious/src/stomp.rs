//! Gradient-free stochastic trajectory optimizer: correlated noisy rollouts,
//! exponentiated per-timestep cost weighting, a smoothing projection on the
//! update, pinned endpoints, and best-so-far tracking.
//!
//! Determinism contract: all noise is drawn sequentially from the seeded
//! source before any cost evaluation, and rollout evaluation is pure, so the
//! result is bit-identical for a given (scenario, config, seed) whether
//! rollouts are evaluated serially or in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::efficient_trajectory;
use crate::geometry::{Bounds, Point2};
use crate::legibility::Trajectory;
use crate::linalg::Matrix;
use crate::objective::cost_vector;
use crate::scalar::Real;
use crate::scenario::Scenario;
use crate::{Error, Result};

/// Optimizer parameters. Everything that shapes a run is explicit here so
/// runs can be reproduced from a manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[serde(bound(
    deserialize = "T: Real + serde::Deserialize<'de>",
    serialize = "T: serde::Serialize"
))]
pub struct StompConfig<T> {
    /// Optimizer iterations.
    pub iterations: usize,
    /// Noisy candidates evaluated per iteration.
    pub rollouts_per_iter: usize,
    /// Noise scale: interior waypoint noise has covariance
    /// `noise_stddev^2 * R^-1` per coordinate.
    pub noise_stddev: T,
    /// Sensitivity `h` of the exponentiated cost-to-weight mapping.
    pub sensitivity: T,
    /// Seed for the random source.
    pub seed: u64,
    /// Record a snapshot of the current iterate every this many iterations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
    /// Evaluate rollout costs in parallel. Results are bit-identical either
    /// way.
    pub parallel: bool,
}

impl<T: Real> Default for StompConfig<T> {
    fn default() -> Self {
        Self {
            iterations: 1000,
            rollouts_per_iter: 20,
            noise_stddev: T::from_f64_lossy(0.1),
            sensitivity: T::from_f64_lossy(10.0),
            seed: 0,
            record_every: None,
            parallel: false,
        }
    }
}

impl<T: Real> StompConfig<T> {
    pub(crate) fn validate(&self, path: &str) -> Result<()> {
        if self.rollouts_per_iter == 0 {
            return Err(Error::invalid(
                format!("{path}.rollouts_per_iter"),
                "at least one rollout per iteration is required",
            ));
        }
        if !(self.noise_stddev > T::zero() && self.noise_stddev.is_finite()) {
            return Err(Error::invalid(
                format!("{path}.noise_stddev"),
                "noise_stddev must be positive and finite",
            ));
        }
        if !(self.sensitivity > T::zero() && self.sensitivity.is_finite()) {
            return Err(Error::invalid(
                format!("{path}.sensitivity"),
                "sensitivity must be positive and finite",
            ));
        }
        if self.record_every == Some(0) {
            return Err(Error::invalid(
                format!("{path}.record_every"),
                "snapshot interval must be at least 1",
            ));
        }
        Ok(())
    }
}

/// Precomputed update operator for a fixed trajectory length: the
/// second-difference acceleration matrix `A` over interior waypoints,
/// `R = A^T A`, the sampling covariance `R^-1`, and the update projection
/// (`R^-1` with each column rescaled to maximum magnitude `1 / waypoints`).
/// Endpoints are excluded throughout.
#[derive(Debug, Clone)]
pub struct SmoothingOperator<T> {
    waypoint_count: usize,
    covariance: Matrix<T>,
    projection: Matrix<T>,
    noise_factor: Matrix<T>,
}

impl<T: Real> SmoothingOperator<T> {
    /// Interior waypoint count.
    pub fn interior(&self) -> usize {
        self.covariance.dim()
    }

    pub fn waypoint_count(&self) -> usize {
        self.waypoint_count
    }

    /// Smooth an interior update in place: `projection * delta`.
    pub fn apply_projection(&self, delta: &[T]) -> Vec<T> {
        self.projection.mul_vec(delta)
    }
}

/// Build the smoothing operator for a trajectory with `waypoint_count`
/// waypoints (at least 3, so at least one interior waypoint exists).
pub fn smoothing_operator<T: Real>(waypoint_count: usize) -> Result<SmoothingOperator<T>> {
    if waypoint_count < 3 {
        return Err(Error::TrajectoryTooShort {
            min: 3,
            got: waypoint_count,
        });
    }
    let n = waypoint_count - 2;
    // second-difference stencil over interior waypoints; the pinned endpoints
    // enter as constants, leaving the Dirichlet form
    let mut accel = Matrix::zeros(n);
    for i in 0..n {
        accel.set(i, i, -T::two());
        if i > 0 {
            accel.set(i, i - 1, T::one());
        }
        if i + 1 < n {
            accel.set(i, i + 1, T::one());
        }
    }
    let r = accel.transpose().mul(&accel);
    let covariance = r
        .inverse_spd()
        .expect("A^T A of the second-difference stencil is positive definite");
    let noise_factor = covariance
        .cholesky()
        .expect("inverse of an SPD matrix is SPD");

    let mut projection = covariance.clone();
    let per_column = T::one() / T::from_usize_lossy(waypoint_count);
    for j in 0..n {
        let mut col_max = T::zero();
        for i in 0..n {
            col_max = col_max.max(covariance.at(i, j).abs());
        }
        let scale = per_column / col_max;
        for i in 0..n {
            projection.set(i, j, covariance.at(i, j) * scale);
        }
    }

    Ok(SmoothingOperator {
        waypoint_count,
        covariance,
        projection,
        noise_factor,
    })
}

/// One noisy candidate: the effective per-interior-waypoint displacement
/// (after bounds clamping) and the resulting trajectory.
#[derive(Debug, Clone)]
pub struct Rollout<T> {
    pub noise: Vec<Point2<T>>,
    pub candidate: Trajectory<T>,
}

/// Draw `rollouts_per_iter` noisy candidates around `base`. Interior noise is
/// zero-mean with covariance `noise_stddev^2 * R^-1` per coordinate (drawn in
/// a fixed order from the seeded source); endpoints stay exact; candidates
/// are clamped to the bounds and the stored noise is the clamped
/// displacement, so `candidate = base + noise` holds exactly.
pub fn sample_rollouts<T, R>(
    base: &Trajectory<T>,
    bounds: &Bounds<T>,
    op: &SmoothingOperator<T>,
    cfg: &StompConfig<T>,
    rng: &mut R,
) -> Vec<Rollout<T>>
where
    T: Real,
    R: Rng + ?Sized,
    StandardNormal: Distribution<T>,
{
    let n = op.interior();
    assert_eq!(
        base.waypoints().len(),
        op.waypoint_count(),
        "operator size must match the trajectory"
    );
    let sigma = cfg.noise_stddev;
    let mut out = Vec::with_capacity(cfg.rollouts_per_iter);
    for _ in 0..cfg.rollouts_per_iter {
        let zx: Vec<T> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let zy: Vec<T> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        let ex = op.noise_factor.mul_vec(&zx);
        let ey = op.noise_factor.mul_vec(&zy);

        let mut pts = base.waypoints().to_vec();
        let mut noise = Vec::with_capacity(n);
        for i in 0..n {
            let raw = Point2::new(pts[i + 1].x + sigma * ex[i], pts[i + 1].y + sigma * ey[i]);
            let clamped = bounds.clamp(&raw);
            noise.push(Point2::new(
                clamped.x - pts[i + 1].x,
                clamped.y - pts[i + 1].y,
            ));
            pts[i + 1] = clamped;
        }
        let candidate = Trajectory::new(pts).expect("clamped candidate stays valid");
        out.push(Rollout { noise, candidate });
    }
    out
}

/// Result of one optimizer step.
#[derive(Debug, Clone)]
pub struct StepOutcome<T> {
    /// The updated iterate (endpoints pinned, bounds respected).
    pub trajectory: Trajectory<T>,
    /// The evaluated rollouts, in draw order.
    pub rollouts: Vec<Rollout<T>>,
    /// Total cost of each rollout, aligned with `rollouts`.
    pub rollout_costs: Vec<T>,
}

const WEIGHT_SPREAD_EPSILON: f64 = 1e-10;

/// One optimizer step: evaluate per-timestep costs of every rollout, convert
/// costs to exponentiated weights per timestep, combine the rollout noises,
/// smooth the combined update, and apply it to `base` with endpoints pinned
/// and bounds clamping.
pub fn stomp_step<T>(
    base: &Trajectory<T>,
    scenario: &Scenario<T>,
    op: &SmoothingOperator<T>,
    cfg: &StompConfig<T>,
    rng: &mut ChaCha8Rng,
) -> Result<StepOutcome<T>>
where
    T: Real + Send + Sync,
    StandardNormal: Distribution<T>,
{
    let rollouts = sample_rollouts(base, &scenario.bounds, op, cfg, rng);
    let cost_vectors = if cfg.parallel {
        rollouts
            .par_iter()
            .map(|r| cost_vector(&r.candidate, scenario))
            .collect::<Result<Vec<_>>>()?
    } else {
        rollouts
            .iter()
            .map(|r| cost_vector(&r.candidate, scenario))
            .collect::<Result<Vec<_>>>()?
    };
    let rollout_costs: Vec<T> = cost_vectors.iter().map(|cv| cv.total()).collect();

    let n = op.interior();
    let k_count = rollouts.len();
    let h = cfg.sensitivity;
    let eps = T::from_f64_lossy(WEIGHT_SPREAD_EPSILON);

    let mut delta_x = vec![T::zero(); n];
    let mut delta_y = vec![T::zero(); n];
    for idx in 0..n {
        let i = idx + 1; // timestep of this interior waypoint
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for cv in &cost_vectors {
            let c = cv.values()[i];
            lo = lo.min(c);
            hi = hi.max(c);
        }
        let spread = hi - lo + eps;
        let mut weight_sum = T::zero();
        let mut acc_x = T::zero();
        let mut acc_y = T::zero();
        for k in 0..k_count {
            let c = cost_vectors[k].values()[i];
            let w = (-h * (c - lo) / spread).exp();
            weight_sum += w;
            acc_x += w * rollouts[k].noise[idx].x;
            acc_y += w * rollouts[k].noise[idx].y;
        }
        delta_x[idx] = acc_x / weight_sum;
        delta_y[idx] = acc_y / weight_sum;
    }

    let smooth_x = op.apply_projection(&delta_x);
    let smooth_y = op.apply_projection(&delta_y);

    let mut pts = base.waypoints().to_vec();
    for idx in 0..n {
        let moved = Point2::new(pts[idx + 1].x + smooth_x[idx], pts[idx + 1].y + smooth_y[idx]);
        pts[idx + 1] = scenario.bounds.clamp(&moved);
    }
    let trajectory = Trajectory::new(pts).expect("updated trajectory stays valid");

    Ok(StepOutcome {
        trajectory,
        rollouts,
        rollout_costs,
    })
}

/// Optimizer output: the lowest-total-cost trajectory ever evaluated, its
/// cost, periodic snapshots of the running best, and the running best cost
/// after each iteration (index 0 is the initialization).
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationResult<T> {
    pub best_trajectory: Trajectory<T>,
    pub best_total_cost: T,
    pub snapshots: Vec<(usize, Trajectory<T>)>,
    pub cost_history: Vec<T>,
}

/// Run the optimizer on a scenario, starting from the straight-line
/// trajectory from start to true goal. Returns the best trajectory ever
/// evaluated (any rollout or iterate), not necessarily the final iterate:
/// with enough iterations the iterates grow increasingly extreme, and the
/// best evaluated trajectory keeps the output well-defined.
pub fn optimize<T>(scenario: &Scenario<T>, cfg: &StompConfig<T>) -> Result<OptimizationResult<T>>
where
    T: Real + Send + Sync,
    StandardNormal: Distribution<T>,
{
    let goal = scenario.true_goal_position()?;
    let steps = scenario.trajectory_steps;
    let mut current = efficient_trajectory(scenario.start, goal, steps);
    let op = smoothing_operator(steps + 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut best = current.clone();
    let mut best_cost = cost_vector(&current, scenario)?.total();
    let mut cost_history = Vec::with_capacity(cfg.iterations + 1);
    cost_history.push(best_cost);
    let mut snapshots = Vec::new();

    for iteration in 1..=cfg.iterations {
        let outcome = stomp_step(&current, scenario, &op, cfg, &mut rng)?;
        for (rollout, &cost) in outcome.rollouts.iter().zip(&outcome.rollout_costs) {
            if cost < best_cost {
                best_cost = cost;
                best = rollout.candidate.clone();
            }
        }
        current = outcome.trajectory;
        let iterate_cost = cost_vector(&current, scenario)?.total();
        if iterate_cost < best_cost {
            best_cost = iterate_cost;
            best = current.clone();
        }
        cost_history.push(best_cost);
        if let Some(every) = cfg.record_every {
            if iteration % every == 0 {
                // the best-so-far is what a run of this many iterations
                // would return, so it is what a snapshot means here
                snapshots.push((iteration, best.clone()));
            }
        }
    }

    Ok(OptimizationResult {
        best_trajectory: best,
        best_total_cost: best_cost,
        snapshots,
        cost_history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::ConvexPolygon;
    use crate::legibility::{GoalId, GoalSet, InferenceConfig};
    use crate::objective::ObjectiveConfig;
    use crate::observers::{Observer, ObserverId};

    fn box_region(x0: f64, y0: f64, x1: f64, y1: f64) -> ConvexPolygon<f64> {
        ConvexPolygon::new(vec![
            Point2::new(x0, y0),
            Point2::new(x1, y0),
            Point2::new(x1, y1),
            Point2::new(x0, y1),
        ])
        .unwrap()
    }

    fn small_scenario() -> Scenario<f64> {
        Scenario {
            schema_version: 1,
            bounds: Bounds::new(Point2::new(-1.0, -5.0), Point2::new(11.0, 5.0)).unwrap(),
            start: Point2::new(0.0, 0.0),
            goals: GoalSet::new(vec![
                (GoalId::from("gr"), Point2::new(10.0, 2.0)),
                (GoalId::from("gd"), Point2::new(10.0, -2.0)),
            ])
            .unwrap(),
            true_goal: GoalId::from("gr"),
            observers: vec![Observer::new(
                ObserverId::from("all"),
                1.0,
                box_region(-1.0, -5.0, 11.0, 5.0),
            )
            .unwrap()],
            trajectory_steps: 10,
            objective: ObjectiveConfig {
                alpha_neg: 1,
                decoy_goal: Some(GoalId::from("gd")),
                inference: InferenceConfig::default(),
            },
            stomp: StompConfig::default(),
        }
    }

    fn quick_cfg() -> StompConfig<f64> {
        StompConfig {
            iterations: 60,
            rollouts_per_iter: 10,
            noise_stddev: 0.08,
            sensitivity: 10.0,
            seed: 7,
            record_every: None,
            parallel: false,
        }
    }

    #[test]
    fn operator_has_second_difference_stencil_and_spd_gram() {
        // trajectory length 5 -> 3 interior waypoints
        let op = smoothing_operator::<f64>(5).unwrap();
        assert_eq!(op.interior(), 3);

        // independent dense check of R = A^T A via nalgebra
        let a = nalgebra::DMatrix::<f64>::from_fn(3, 3, |i, j| {
            if i == j {
                -2.0
            } else if i.abs_diff(j) == 1 {
                1.0
            } else {
                0.0
            }
        });
        let r = a.transpose() * &a;
        let eig = r.clone().symmetric_eigen();
        assert!(
            eig.eigenvalues.iter().all(|&l| l > 0.0),
            "R must be positive definite"
        );
        let r_inv = r.try_inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!(
                    (op.covariance.at(i, j) - r_inv[(i, j)]).abs() < 1e-9,
                    "covariance mismatch at ({i},{j})"
                );
            }
        }
    }

    #[test]
    fn covariance_is_symmetric() {
        let op = smoothing_operator::<f64>(12).unwrap();
        let n = op.interior();
        for i in 0..n {
            for j in 0..n {
                assert!((op.covariance.at(i, j) - op.covariance.at(j, i)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn projection_columns_peak_at_inverse_waypoint_count() {
        let op = smoothing_operator::<f64>(8).unwrap();
        let n = op.interior();
        for j in 0..n {
            let mut col_max: f64 = 0.0;
            for i in 0..n {
                col_max = col_max.max(op.projection.at(i, j).abs());
            }
            assert!((col_max - 1.0 / 8.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_delta_yields_zero_update() {
        let op = smoothing_operator::<f64>(7).unwrap();
        let out = op.apply_projection(&vec![0.0; op.interior()]);
        assert!(out.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn too_short_trajectory_is_rejected() {
        assert_eq!(
            smoothing_operator::<f64>(2).unwrap_err(),
            Error::TrajectoryTooShort { min: 3, got: 2 }
        );
    }

    #[test]
    fn zero_sigma_rollouts_equal_base() {
        let scenario = small_scenario();
        let base = efficient_trajectory(scenario.start, Point2::new(10.0, 2.0), 10);
        let op = smoothing_operator(11).unwrap();
        let cfg = StompConfig {
            noise_stddev: 0.0,
            ..quick_cfg()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for rollout in sample_rollouts(&base, &scenario.bounds, &op, &cfg, &mut rng) {
            assert_eq!(rollout.candidate, base);
            assert!(rollout.noise.iter().all(|p| p.x == 0.0 && p.y == 0.0));
        }
    }

    #[test]
    fn rollout_endpoints_are_pinned_and_draws_are_reproducible() {
        let scenario = small_scenario();
        let base = efficient_trajectory(scenario.start, Point2::new(10.0, 2.0), 10);
        let op = smoothing_operator(11).unwrap();
        let cfg = quick_cfg();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sample_rollouts(&base, &scenario.bounds, &op, &cfg, &mut rng)
        };
        let a = draw(9);
        let b = draw(9);
        for (ra, rb) in a.iter().zip(&b) {
            assert_eq!(ra.candidate, rb.candidate, "same seed must be bit-identical");
        }
        for rollout in &a {
            assert_eq!(rollout.candidate.start(), base.start());
            assert_eq!(rollout.candidate.end(), base.end());
            assert!(rollout
                .candidate
                .waypoints()
                .iter()
                .all(|p| scenario.bounds.contains(p)));
        }
    }

    #[test]
    fn equal_costs_give_smoothed_mean_noise_update() {
        // observer-free scenario: every candidate costs zero, so the update
        // must be the smoothed mean of the noises
        let mut scenario = small_scenario();
        scenario.observers.clear();
        let base = efficient_trajectory(scenario.start, Point2::new(10.0, 2.0), 10);
        let op = smoothing_operator(11).unwrap();
        let cfg = quick_cfg();

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let outcome = stomp_step(&base, &scenario, &op, &cfg, &mut rng).unwrap();
        assert!(outcome.rollout_costs.iter().all(|&c| c == 0.0));

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rollouts = sample_rollouts(&base, &scenario.bounds, &op, &cfg, &mut rng);
        let n = op.interior();
        let k = rollouts.len() as f64;
        let mean_x: Vec<f64> = (0..n)
            .map(|i| rollouts.iter().map(|r| r.noise[i].x).sum::<f64>() / k)
            .collect();
        let mean_y: Vec<f64> = (0..n)
            .map(|i| rollouts.iter().map(|r| r.noise[i].y).sum::<f64>() / k)
            .collect();
        let sx = op.apply_projection(&mean_x);
        let sy = op.apply_projection(&mean_y);
        for i in 0..n {
            let expect = Point2::new(
                base.waypoints()[i + 1].x + sx[i],
                base.waypoints()[i + 1].y + sy[i],
            );
            let got = outcome.trajectory.waypoints()[i + 1];
            assert!((got.x - expect.x).abs() < 1e-12 && (got.y - expect.y).abs() < 1e-12);
        }
    }

    #[test]
    fn dominant_rollout_wins_with_large_sensitivity() {
        // two rollouts, one strictly better everywhere, huge h: the update
        // must be (the smoothed projection of) the winner's noise
        let scenario = small_scenario();
        let base = efficient_trajectory(scenario.start, Point2::new(10.0, 2.0), 10);
        let op = smoothing_operator(11).unwrap();
        let cfg = StompConfig {
            rollouts_per_iter: 2,
            sensitivity: 1e6,
            ..quick_cfg()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let outcome = stomp_step(&base, &scenario, &op, &cfg, &mut rng).unwrap();

        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let rollouts = sample_rollouts(&base, &scenario.bounds, &op, &cfg, &mut rng);
        let cvs: Vec<_> = rollouts
            .iter()
            .map(|r| cost_vector(&r.candidate, &scenario).unwrap())
            .collect();
        let n = op.interior();
        // pick the per-timestep winner's noise; where one rollout dominates
        // every interior timestep this is that rollout's noise
        let mut delta_x = vec![0.0; n];
        let mut delta_y = vec![0.0; n];
        for idx in 0..n {
            let i = idx + 1;
            let k_best = if cvs[0].values()[i] <= cvs[1].values()[i] { 0 } else { 1 };
            delta_x[idx] = rollouts[k_best].noise[idx].x;
            delta_y[idx] = rollouts[k_best].noise[idx].y;
        }
        let sx = op.apply_projection(&delta_x);
        let sy = op.apply_projection(&delta_y);
        for idx in 0..n {
            let expect_x = base.waypoints()[idx + 1].x + sx[idx];
            let expect_y = base.waypoints()[idx + 1].y + sy[idx];
            let got = outcome.trajectory.waypoints()[idx + 1];
            assert!(
                (got.x - expect_x).abs() < 1e-9 && (got.y - expect_y).abs() < 1e-9,
                "winner-take-all update mismatch at interior {idx}"
            );
        }
    }

    #[test]
    fn zero_iterations_returns_straight_line() {
        let scenario = small_scenario();
        let cfg = StompConfig {
            iterations: 0,
            ..quick_cfg()
        };
        let result = optimize(&scenario, &cfg).unwrap();
        let line = efficient_trajectory(scenario.start, Point2::new(10.0, 2.0), 10);
        assert_eq!(result.best_trajectory, line);
        assert_eq!(result.cost_history.len(), 1);
        assert!(result.snapshots.is_empty());
    }

    #[test]
    fn optimization_improves_legibility_over_straight_line() {
        let scenario = small_scenario();
        let cfg = StompConfig {
            iterations: 150,
            ..quick_cfg()
        };
        let result = optimize(&scenario, &cfg).unwrap();
        let line = efficient_trajectory(scenario.start, Point2::new(10.0, 2.0), 10);
        let cfg_inf = InferenceConfig::default();
        let s_best = crate::legibility::legibility_score(
            &result.best_trajectory,
            &scenario.goals,
            &scenario.true_goal,
            &cfg_inf,
        )
        .unwrap();
        let s_line = crate::legibility::legibility_score(
            &line,
            &scenario.goals,
            &scenario.true_goal,
            &cfg_inf,
        )
        .unwrap();
        assert!(
            s_best > s_line,
            "optimized legibility {s_best} must beat straight line {s_line}"
        );
    }

    #[test]
    fn cost_history_is_non_increasing_and_endpoints_pinned() {
        let scenario = small_scenario();
        let cfg = StompConfig {
            record_every: Some(10),
            ..quick_cfg()
        };
        let result = optimize(&scenario, &cfg).unwrap();
        for w in result.cost_history.windows(2) {
            assert!(w[1] <= w[0], "cost history must be non-increasing");
        }
        assert_eq!(result.best_trajectory.start(), scenario.start);
        assert_eq!(result.best_trajectory.end(), Point2::new(10.0, 2.0));
        for (_, snap) in &result.snapshots {
            assert_eq!(snap.start(), scenario.start);
            assert_eq!(snap.end(), Point2::new(10.0, 2.0));
        }
        assert_eq!(result.snapshots.len(), 6);
        assert_eq!(result.cost_history.len(), cfg.iterations + 1);
    }

    #[test]
    fn identical_runs_are_bit_identical_including_parallel_evaluation() {
        let scenario = small_scenario();
        let cfg = quick_cfg();
        let serial_a = optimize(&scenario, &cfg).unwrap();
        let serial_b = optimize(&scenario, &cfg).unwrap();
        assert_eq!(serial_a, serial_b);
        let par = optimize(
            &scenario,
            &StompConfig {
                parallel: true,
                ..cfg
            },
        )
        .unwrap();
        assert_eq!(
            serial_a, par,
            "parallel evaluation must not change any bit of the result"
        );
    }

    #[test]
    fn smoothing_projection_reduces_relative_curvature_of_random_updates() {
        let op = smoothing_operator::<f64>(20).unwrap();
        let n = op.interior();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let msd = |v: &[f64]| -> f64 {
            let mut acc = 0.0;
            for i in 1..v.len() - 1 {
                let dd = v[i - 1] - 2.0 * v[i] + v[i + 1];
                acc += dd * dd;
            }
            acc / (v.len() - 2) as f64
        };
        let norm2 = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
        for _ in 0..50 {
            let delta: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let smoothed = op.apply_projection(&delta);
            let rel_raw = msd(&delta) / norm2(&delta);
            let rel_smooth = msd(&smoothed) / norm2(&smoothed);
            assert!(
                rel_smooth <= rel_raw,
                "projection must not increase relative curvature: {rel_smooth} vs {rel_raw}"
            );
        }
    }
}
