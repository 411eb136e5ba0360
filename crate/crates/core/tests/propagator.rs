mod support;

use sabpi::model::MemoryVector;
use sabpi::propagate::{propagate, propagate_with_step, Outcome};
use serde_json::json;
use support::fixtures::{bisect_root, oscillator_scenario, quadcopter_scenario, sensing_scenario};

fn rk4_error(h: f64) -> f64 {
    let s = oscillator_scenario(vec![], vec![]);
    let t = 2.0;
    let r = propagate_with_step(&s, &[1.0, 0.0], MemoryVector::EMPTY, &[0.0], t, h);
    assert_eq!(r.outcome, Outcome::FullDuration);
    ((r.x_end[0] - t.cos()).powi(2) + (r.x_end[1] + t.sin()).powi(2)).sqrt()
}

#[test]
fn rk4_is_fourth_order() {
    for h in [0.2, 0.1, 0.05] {
        let ratio = rk4_error(h) / rk4_error(h / 2.0);
        assert!((12.0..=20.0).contains(&ratio), "h = {h}: ratio {ratio}");
    }
}

#[test]
fn oscillator_region_crossing() {
    // y(t) = -sin t reaches -0.5 at t = pi / 6.
    let s = oscillator_scenario(vec![json!({ "type": "box", "lower": [-5.0, -5.0], "upper": [5.0, -0.5] })], vec![]);
    let r = propagate(&s, &[1.0, 0.0], MemoryVector::EMPTY, &[0.0], 1.0);
    assert_eq!(r.outcome, Outcome::HitRegion(0));
    assert!((r.t_actual - std::f64::consts::FRAC_PI_6).abs() <= 1e-6, "{}", r.t_actual);
}

#[test]
fn oscillator_obstacle_crossing() {
    // x(t) = cos t reaches 0 at t = pi / 2.
    let s = oscillator_scenario(vec![], vec![json!({ "type": "box", "lower": [-5.0, -5.0], "upper": [0.0, 5.0] })]);
    let r = propagate(&s, &[1.0, 0.0], MemoryVector::EMPTY, &[0.0], 2.0);
    assert_eq!(r.outcome, Outcome::Collided);
    assert!((r.t_actual - std::f64::consts::FRAC_PI_2).abs() <= 1e-6, "{}", r.t_actual);
}

#[test]
fn quadcopter_with_drag_crossing() {
    let (drag, u, gap) = (0.5, 0.8, 1.5);
    let s = quadcopter_scenario(drag, 1.0 + gap);
    let x = |t: f64| u / drag * (t - (1.0 - (-drag * t).exp()) / drag);
    let expected = bisect_root(|t| x(t) - gap, 0.0, 10.0);
    let r = propagate(&s, &[1.0, 10.0, 10.0, 0.0, 0.0, 0.0], MemoryVector::EMPTY, &[u, 0.0, 0.0], 5.0);
    assert_eq!(r.outcome, Outcome::HitRegion(0));
    assert!((r.t_actual - expected).abs() <= 1e-6, "{} vs {expected}", r.t_actual);
}

#[test]
fn sensing_ball_entry() {
    // From (1, 5) heading +x the ball of radius 3 around (5, 5) starts at x = 2.
    let s = sensing_scenario(1, false, &[0.5, 0.5], &[vec![0.9, 0.1], vec![0.1, 0.9]]);
    let r = propagate(&s, &[1.0, 5.0], MemoryVector::EMPTY, &[1.0, 0.0], 2.0);
    assert_eq!(r.outcome, Outcome::HitObservation(0));
    assert!((r.t_actual - 1.0).abs() <= 1e-6, "{}", r.t_actual);
    // Once visited, the ball no longer stops the flow; the site box does.
    let r = propagate(&s, &[1.0, 5.0], MemoryVector::EMPTY.update(0), &[1.0, 0.0], 4.0);
    assert_eq!(r.outcome, Outcome::HitRegion(0));
    assert!((r.t_actual - 3.0).abs() <= 1e-6, "{}", r.t_actual);
}
