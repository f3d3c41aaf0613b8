//! Scenario files: the TOML schema, parsing with field-path diagnostics,
//! defaulting (uniform prior, farthest-goal decoy, optimizer defaults), and
//! round-trip serialization.
//!
//! Top-level keys: `schema_version`, `bounds`, `start`, `goals`, `true_goal`,
//! `decoy_goal`, `observers`, `trajectory_steps`, `objective`, `stomp`. The
//! README documents the schema and every default.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::geometry::{Bounds, ConvexPolygon, Point2};
use crate::legibility::{GoalId, GoalSet};
use crate::objective::ObjectiveConfig;
use crate::observers::{Observer, ObserverId};
use crate::scalar::Real;
use crate::stomp::StompConfig;
use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// A fully validated planning problem: workspace, goals, observers, and
/// configuration. `decoy_goal` is resolved (defaulting to the candidate goal
/// farthest from the true goal) whenever more than one goal exists.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario<T> {
    pub schema_version: u32,
    pub bounds: Bounds<T>,
    pub start: Point2<T>,
    pub goals: GoalSet<T>,
    pub true_goal: GoalId,
    pub observers: Vec<Observer<T>>,
    pub trajectory_steps: usize,
    pub objective: ObjectiveConfig<T>,
    pub stomp: StompConfig<T>,
}

impl<T: Real> Scenario<T> {
    pub fn true_goal_index(&self) -> Result<usize> {
        self.goals.require(&self.true_goal)
    }

    pub fn true_goal_position(&self) -> Result<Point2<T>> {
        Ok(self.goals.position(self.true_goal_index()?))
    }

    pub fn decoy_goal_index(&self) -> Result<Option<usize>> {
        match &self.objective.decoy_goal {
            Some(id) => Ok(Some(self.goals.require(id)?)),
            None => Ok(None),
        }
    }

    /// Cross-field invariants. Construction from a file runs this; hand-built
    /// scenarios should call it before planning.
    pub fn validate(&self) -> Result<()> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::invalid(
                "schema_version",
                format!("unsupported version {} (expected {SCHEMA_VERSION})", self.schema_version),
            ));
        }
        if self.trajectory_steps < 2 {
            return Err(Error::invalid(
                "trajectory_steps",
                "at least 2 steps are required",
            ));
        }
        if !self.bounds.contains(&self.start) {
            return Err(Error::invalid("start", "start must lie within bounds"));
        }
        for (i, (id, pos)) in self.goals.iter().enumerate() {
            if !self.bounds.contains(pos) {
                return Err(Error::invalid(
                    format!("goals[{i}]"),
                    format!("goal `{id}` must lie within bounds"),
                ));
            }
        }
        if self.goals.index_of(&self.true_goal).is_none() {
            return Err(Error::invalid(
                "true_goal",
                format!("`{}` is not a goal id", self.true_goal),
            ));
        }
        if let Some(decoy) = &self.objective.decoy_goal {
            if self.goals.index_of(decoy).is_none() {
                return Err(Error::invalid(
                    "decoy_goal",
                    format!("`{decoy}` is not a goal id"),
                ));
            }
            if *decoy == self.true_goal {
                return Err(Error::invalid(
                    "decoy_goal",
                    format!("decoy_goal `{decoy}` must differ from true_goal `{}`", self.true_goal),
                ));
            }
        } else if self.observers.iter().any(|o| o.is_negative()) {
            return Err(Error::invalid(
                "decoy_goal",
                "a decoy goal is required when negative observers are present",
            ));
        }
        let bounds_poly = self.bounds.as_polygon();
        for (i, obs) in self.observers.iter().enumerate() {
            if self.observers[..i].iter().any(|o| o.id() == obs.id()) {
                return Err(Error::invalid(
                    format!("observers[{i}].id"),
                    format!("duplicate observer id `{}`", obs.id()),
                ));
            }
            if !obs.region().intersects(&bounds_poly) {
                return Err(Error::invalid(
                    format!("observers[{i}].region"),
                    "visibility region does not intersect the workspace bounds",
                ));
            }
        }
        self.objective.validate("objective")?;
        self.stomp.validate("stomp")?;
        Ok(())
    }
}

// ---- raw file schema ----

// Plain values precede tables so TOML serialization stays valid.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(
    deserialize = "T: crate::scalar::Real + serde::Deserialize<'de>",
    serialize = "T: serde::Serialize"
))]
struct RawScenario<T> {
    #[serde(default = "default_schema_version")]
    schema_version: u32,
    start: [T; 2],
    true_goal: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    decoy_goal: Option<String>,
    trajectory_steps: usize,
    bounds: RawBounds<T>,
    goals: Vec<RawGoal<T>>,
    #[serde(default)]
    observers: Vec<RawObserver<T>>,
    #[serde(default = "RawObjective::default_raw")]
    objective: RawObjective<T>,
    #[serde(default)]
    stomp: Option<StompConfig<T>>,
}

fn default_schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounds<T> {
    min: [T; 2],
    max: [T; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(
    deserialize = "T: serde::Deserialize<'de>",
    serialize = "T: serde::Serialize"
))]
struct RawGoal<T> {
    id: String,
    position: [T; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prior: Option<T>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObserver<T> {
    id: String,
    motive: T,
    region: Vec<[T; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[serde(bound(
    deserialize = "T: crate::scalar::Real + serde::Deserialize<'de>",
    serialize = "T: serde::Serialize"
))]
struct RawObjective<T> {
    #[serde(default = "default_alpha")]
    alpha_neg: i8,
    #[serde(default)]
    inference: Option<crate::legibility::InferenceConfig<T>>,
}

fn default_alpha() -> i8 {
    1
}

impl<T> RawObjective<T> {
    fn default_raw() -> Self {
        Self {
            alpha_neg: default_alpha(),
            inference: None,
        }
    }
}

fn point<T: Real>(xy: [T; 2], path: &str) -> Result<Point2<T>> {
    let p = Point2::new(xy[0], xy[1]);
    if !p.is_finite() {
        return Err(Error::invalid(path, "coordinates must be finite"));
    }
    Ok(p)
}

/// Identifier rule for goal and observer ids: ASCII letters, digits, `_`,
/// `-`, and `.`. Keeps CSV and SVG output unambiguous without quoting.
fn check_identifier(id: &str, path: &str) -> Result<()> {
    if id.is_empty() {
        return Err(Error::invalid(path, "identifier must be non-empty"));
    }
    if !id
        .chars()
        .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
    {
        return Err(Error::invalid(
            path,
            format!("identifier `{id}` may only contain ASCII letters, digits, `_`, `-`, `.`"),
        ));
    }
    Ok(())
}

/// Parse and fully validate a scenario document, applying defaults: uniform
/// prior, default inference and optimizer configuration, and the
/// farthest-goal decoy when `decoy_goal` is omitted.
pub fn parse_scenario<T>(text: &str) -> Result<Scenario<T>>
where
    T: Real + DeserializeOwned,
{
    let raw: RawScenario<T> = toml::from_str(text)
        .map_err(|e| Error::invalid("scenario", format!("TOML parse error: {e}")))?;
    scenario_from_raw(raw)
}

fn scenario_from_raw<T: Real>(raw: RawScenario<T>) -> Result<Scenario<T>> {
    let min = point(raw.bounds.min, "bounds.min")?;
    let max = point(raw.bounds.max, "bounds.max")?;
    let bounds = Bounds::new(min, max).map_err(|e| match e {
        Error::Invalid { message, .. } => Error::invalid("bounds", message),
        other => other,
    })?;
    let start = point(raw.start, "start")?;

    let mut goals = Vec::with_capacity(raw.goals.len());
    let mut priors = Vec::with_capacity(raw.goals.len());
    for (i, g) in raw.goals.iter().enumerate() {
        check_identifier(&g.id, &format!("goals[{i}].id"))?;
        let pos = point(g.position, &format!("goals[{i}].position"))?;
        goals.push((GoalId::new(g.id.clone()), pos));
        priors.push(g.prior);
    }
    let goal_set = if priors.iter().all(Option::is_none) {
        GoalSet::new(goals)?
    } else if priors.iter().all(Option::is_some) {
        GoalSet::with_prior(goals, priors.into_iter().map(Option::unwrap).collect())?
    } else {
        return Err(Error::invalid(
            "goals",
            "either every goal specifies a prior or none does",
        ));
    };

    check_identifier(&raw.true_goal, "true_goal")?;
    let true_goal = GoalId::new(raw.true_goal.clone());
    let true_index = goal_set
        .index_of(&true_goal)
        .ok_or_else(|| Error::invalid("true_goal", format!("`{true_goal}` is not a goal id")))?;

    let decoy_goal = match &raw.decoy_goal {
        Some(id) => {
            check_identifier(id, "decoy_goal")?;
            let decoy = GoalId::new(id.clone());
            if goal_set.index_of(&decoy).is_none() {
                return Err(Error::invalid(
                    "decoy_goal",
                    format!("`{decoy}` is not a goal id"),
                ));
            }
            if decoy == true_goal {
                return Err(Error::invalid(
                    "decoy_goal",
                    format!("decoy_goal `{decoy}` must differ from true_goal `{true_goal}`"),
                ));
            }
            Some(decoy)
        }
        None => farthest_goal(&goal_set, true_index),
    };

    let mut observers = Vec::with_capacity(raw.observers.len());
    for (i, o) in raw.observers.iter().enumerate() {
        check_identifier(&o.id, &format!("observers[{i}].id"))?;
        let mut vertices = Vec::with_capacity(o.region.len());
        for (j, v) in o.region.iter().enumerate() {
            vertices.push(point(*v, &format!("observers[{i}].region[{j}]"))?);
        }
        let region = ConvexPolygon::new(vertices).map_err(|e| match e {
            Error::Invalid { message, .. } => {
                Error::invalid(format!("observers[{i}].region"), message)
            }
            other => other,
        })?;
        let observer = Observer::new(ObserverId::new(o.id.clone()), o.motive, region)
            .map_err(|e| match e {
                Error::Invalid { message, .. } => {
                    Error::invalid(format!("observers[{i}].motive"), message)
                }
                other => other,
            })?;
        observers.push(observer);
    }

    let objective = ObjectiveConfig {
        alpha_neg: raw.objective.alpha_neg,
        decoy_goal,
        inference: raw.objective.inference.unwrap_or_default(),
    };
    let scenario = Scenario {
        schema_version: raw.schema_version,
        bounds,
        start,
        goals: goal_set,
        true_goal,
        observers,
        trajectory_steps: raw.trajectory_steps,
        objective,
        stomp: raw.stomp.unwrap_or_default(),
    };
    scenario.validate()?;
    Ok(scenario)
}

/// Default decoy: the candidate goal farthest from the true goal. Ties keep
/// the earliest goal in file order. `None` when no other goal exists.
fn farthest_goal<T: Real>(goals: &GoalSet<T>, true_index: usize) -> Option<GoalId> {
    let true_pos = goals.position(true_index);
    let mut best: Option<(usize, T)> = None;
    for i in 0..goals.len() {
        if i == true_index {
            continue;
        }
        let d = goals.position(i).distance_squared(&true_pos);
        match best {
            Some((_, best_d)) if d <= best_d => {}
            _ => best = Some((i, d)),
        }
    }
    best.map(|(i, _)| goals.id(i).clone())
}

/// Serialize a scenario back to TOML with all resolved values explicit.
/// `parse_scenario(serialize_scenario(s)) == s` for every valid scenario.
pub fn serialize_scenario<T>(scenario: &Scenario<T>) -> String
where
    T: Real + Serialize,
{
    let raw = RawScenario {
        schema_version: scenario.schema_version,
        start: [scenario.start.x, scenario.start.y],
        bounds: RawBounds {
            min: [scenario.bounds.min().x, scenario.bounds.min().y],
            max: [scenario.bounds.max().x, scenario.bounds.max().y],
        },
        goals: scenario
            .goals
            .iter()
            .zip(scenario.goals.prior())
            .map(|((id, pos), &prior)| RawGoal {
                id: id.as_str().to_owned(),
                position: [pos.x, pos.y],
                prior: Some(prior),
            })
            .collect(),
        true_goal: scenario.true_goal.as_str().to_owned(),
        decoy_goal: scenario
            .objective
            .decoy_goal
            .as_ref()
            .map(|g| g.as_str().to_owned()),
        observers: scenario
            .observers
            .iter()
            .map(|o| RawObserver {
                id: o.id().as_str().to_owned(),
                motive: o.motive(),
                region: o.region().vertices().iter().map(|p| [p.x, p.y]).collect(),
            })
            .collect(),
        trajectory_steps: scenario.trajectory_steps,
        objective: RawObjective {
            alpha_neg: scenario.objective.alpha_neg,
            inference: Some(scenario.objective.inference),
        },
        stomp: Some(scenario.stomp.clone()),
    };
    toml::to_string(&raw).expect("scenario serialization cannot fail")
}
