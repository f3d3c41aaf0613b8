//! (Il)legible motion planning for mixed-motive observers with limited
//! visibility.
//!
//! An agent moves from a start to its true goal inside a bounded planar
//! workspace that also contains candidate goals and a set of observers. Each
//! observer has a motive in `[-1, 1]` and a convex visibility region, and
//! infers the agent's goal from the portion of the trajectory it can see. The
//! planner optimizes a trajectory that reveals the true goal to positive
//! observers while misleading (decoy strategy) or starving (avoidance
//! strategy) negative ones, using a gradient-free stochastic trajectory
//! optimizer over noisy rollouts.
//!
//! The crate is generic over the scalar type (see [`scalar::Real`]); `f64`
//! aliases are exported at the root. The CLI layer (`dubious-cli`) works in
//! `f64` throughout.

pub mod baselines;
pub mod export;
pub mod geometry;
pub mod legibility;
pub mod metrics;
pub mod objective;
pub mod observers;
pub mod scalar;
pub mod scenario;
pub mod stomp;

mod linalg;

pub use geometry::{Bounds, ConvexPolygon, Point2};
pub use legibility::{GoalId, GoalPosterior, GoalSet, InferenceConfig, Trajectory};
pub use objective::{CostVector, ObjectiveConfig};
pub use observers::{BeliefTrace, Observer, ObserverId, VisibleTrace};
pub use scalar::Real;
pub use scenario::Scenario;
pub use stomp::{OptimizationResult, StompConfig};

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Every goal weight vanished during posterior normalization. Signals a
    /// temperature too large for the workspace cost scale.
    #[error("degenerate posterior: all goal weights vanished")]
    DegeneratePosterior,

    #[error("unknown goal id `{0}`")]
    UnknownGoal(String),

    #[error("decoy goal `{0}` equals the true goal")]
    DecoyEqualsTrueGoal(String),

    #[error("trajectory too short: need at least {min} waypoints, got {got}")]
    TrajectoryTooShort { min: usize, got: usize },

    /// Validation failure with a field-path diagnostic, e.g.
    /// `observers[1].region: polygon is not convex`.
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

impl Error {
    pub(crate) fn invalid(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Double-precision aliases for the common case.
pub type Point2F64 = Point2<f64>;
pub type BoundsF64 = Bounds<f64>;
pub type TrajectoryF64 = Trajectory<f64>;
pub type GoalSetF64 = GoalSet<f64>;
pub type ObserverF64 = Observer<f64>;
pub type ScenarioF64 = Scenario<f64>;

/// Single-precision aliases.
pub type Point2F32 = Point2<f32>;
pub type TrajectoryF32 = Trajectory<f32>;
