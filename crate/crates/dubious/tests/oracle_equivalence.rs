//! Score functions against an independent brute-force oracle: frozen values
//! for the worked examples, exhaustive lattice comparison, and the visible-
//! portion machinery against naive per-timestep evaluation.

mod common;

use common::*;
use dubious::geometry::{ConvexPolygon, Point2};
use dubious::legibility::{
    goal_posterior, illegibility_ambiguous_score, illegibility_decoy_score, legibility_score,
    GoalId, GoalSet, InferenceConfig,
};
use dubious::observers::{observed_posterior, visible_trace, Observer, ObserverId};

fn goals2() -> GoalSet<f64> {
    GoalSet::new(vec![
        (GoalId::from("g1"), Point2::new(5.0, 5.0)),
        (GoalId::from("g2"), Point2::new(5.0, -5.0)),
    ])
    .unwrap()
}

#[test]
fn frozen_posterior_on_half_prefix_toward_goal() {
    // straight line toward g1, prefix to t = 10 of T = 20, beta = 1;
    // frozen from the independent oracle (equals 1 / (1 + e^-2.5))
    let goals = goals2();
    let prefix: Vec<Point2<f64>> = (0..=10)
        .map(|t| Point2::new(0.25 * t as f64, 0.25 * t as f64))
        .collect();
    let post = goal_posterior(&prefix, &goals, 20, &InferenceConfig::default()).unwrap();
    assert!((post.prob(0) - 0.92414181997875655).abs() < 1e-12);
    assert!((post.prob(1) - 0.07585818002124356).abs() < 1e-12);
}

#[test]
fn frozen_scores_on_straight_and_bowed_lines() {
    let goals = goals2();
    let cfg = InferenceConfig::default();
    let line = to_trajectory(
        &(0..=20)
            .map(|t| (0.25 * t as f64, 0.25 * t as f64))
            .collect::<Vec<_>>(),
    );
    let bowed = to_trajectory(
        &(0..=20)
            .map(|t| {
                let s = t as f64 / 20.0;
                (5.0 * s, 5.0 * s + 1.5 * (std::f64::consts::PI * s).sin())
            })
            .collect::<Vec<_>>(),
    );

    let leg = legibility_score(&line, &goals, &GoalId::from("g1"), &cfg).unwrap();
    assert!((leg - 0.74158102105137735).abs() < 1e-12);

    let leg_bowed = legibility_score(&bowed, &goals, &GoalId::from("g1"), &cfg).unwrap();
    assert!((leg_bowed - 0.80635418237128231).abs() < 1e-12);
    assert!(leg_bowed > leg, "bowing away from g2 must increase legibility");

    let decoy = illegibility_decoy_score(&line, &goals, &GoalId::from("g2"), &cfg).unwrap();
    assert!((decoy - 0.25841897894862248).abs() < 1e-12);
    assert!(decoy < 0.5);
}

#[test]
fn lattice_scores_match_oracle_for_two_and_three_goals() {
    let cfg = InferenceConfig::default();
    let goal_sets = [
        vec![(4.0, 4.0), (4.0, 0.0)],
        vec![(4.0, 4.0), (4.0, 0.0), (0.0, 4.0)],
    ];
    for positions in goal_sets {
        let oracle_goals = OracleGoals::uniform(positions.clone());
        let goals = GoalSet::new(
            positions
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| (GoalId::new(format!("g{i}")), Point2::new(x, y)))
                .collect(),
        )
        .unwrap();
        let mut checked = 0usize;
        for steps in 2..=8 {
            for points in monotone_lattice_trajectories((0, 0), (4, 4), steps) {
                let traj = to_trajectory(&points);
                let leg = legibility_score(&traj, &goals, &GoalId::from("g0"), &cfg).unwrap();
                let leg_oracle = oracle_legibility(&points, &oracle_goals, 0, 1.0);
                assert!(
                    (leg - leg_oracle).abs() < 1e-12,
                    "legibility {leg} vs oracle {leg_oracle} on {points:?}"
                );

                let dec =
                    illegibility_decoy_score(&traj, &goals, &GoalId::from("g1"), &cfg).unwrap();
                let dec_oracle = oracle_legibility(&points, &oracle_goals, 1, 1.0);
                assert!((dec - dec_oracle).abs() < 1e-12);

                let amb =
                    illegibility_ambiguous_score(&traj, &goals, &GoalId::from("g0"), &cfg)
                        .unwrap();
                let amb_oracle = oracle_ambiguous(&points, &oracle_goals, 0, 1.0);
                assert!((amb - amb_oracle).abs() < 1e-12);
                checked += 1;
            }
        }
        assert!(checked > 500, "expected a substantial lattice sweep");
    }
}

#[test]
fn visible_restricted_scores_match_oracle_on_partial_box() {
    let scenario = load_scenario("partial_view_ally.toml");
    let ally = &scenario.observers[0];
    let cfg = scenario.objective.inference;
    // a weaving trajectory that enters and leaves the box
    let points: Vec<(f64, f64)> = (0..=40)
        .map(|t| {
            let s = t as f64 / 40.0;
            (0.5 + 9.0 * s, 5.0 + 2.0 * (6.0 * s).sin() * (1.0 - s))
        })
        .collect();
    let traj = to_trajectory(&points);
    let (leg, decoy, amb) =
        dubious::metrics::observer_scores(&traj, ally, &scenario, &cfg).unwrap();

    let oracle_goals = OracleGoals::uniform(vec![(9.5, 7.0), (9.5, 3.0)]);
    let inside = |p: (f64, f64)| {
        ally.sees(&Point2::new(p.0, p.1))
    };
    let (leg_o, decoy_o, amb_o) = oracle_visible_scores(&points, inside, &oracle_goals, 0, 1, 1.0);
    assert!((leg - leg_o).abs() < 1e-12, "{leg} vs {leg_o}");
    assert!((decoy - decoy_o).abs() < 1e-12, "{decoy} vs {decoy_o}");
    assert!((amb - amb_o).abs() < 1e-12, "{amb} vs {amb_o}");
}

#[test]
fn observed_posterior_matches_oracle_on_gappy_traces() {
    // trajectory weaving in and out of a box region
    let region = ConvexPolygon::new(vec![
        Point2::new(3.0, -2.0),
        Point2::new(9.0, -2.0),
        Point2::new(9.0, 2.0),
        Point2::new(3.0, 2.0),
    ])
    .unwrap();
    let obs = Observer::new(ObserverId::from("o"), -0.5, region.clone()).unwrap();
    let points: Vec<(f64, f64)> = (0..=16)
        .map(|t| {
            let x = 0.75 * t as f64;
            let y = 2.5 * ((t as f64) * 0.9).sin();
            (x, y)
        })
        .collect();
    let traj = to_trajectory(&points);
    let goals = GoalSet::new(vec![
        (GoalId::from("a"), Point2::new(12.0, 3.0)),
        (GoalId::from("b"), Point2::new(12.0, -3.0)),
        (GoalId::from("c"), Point2::new(12.0, 0.0)),
    ])
    .unwrap();
    let oracle_goals = OracleGoals::uniform(vec![(12.0, 3.0), (12.0, -3.0), (12.0, 0.0)]);
    let cfg = InferenceConfig::default();

    let mut saw_gap = false;
    for upto in 0..=16 {
        let trace = visible_trace(&traj, &obs, upto);
        if trace.segments().count() > 1 {
            saw_gap = true;
        }
        let post = observed_posterior(&trace, &goals, 16, &cfg).unwrap();
        let samples: Vec<(usize, (f64, f64))> = trace
            .samples()
            .iter()
            .map(|(t, p)| (*t, (p.x, p.y)))
            .collect();
        let expect = oracle_visible_posterior(&samples, &oracle_goals, 16, 1.0);
        for (g, &e) in expect.iter().enumerate() {
            assert!(
                (post.prob(g) - e).abs() < 1e-12,
                "upto={upto} goal={g}: {} vs {e}",
                post.prob(g)
            );
        }
    }
    assert!(saw_gap, "the weave must actually produce a gappy trace");
}
