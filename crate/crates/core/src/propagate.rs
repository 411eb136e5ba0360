//! Flow-until-guard integration with event localization.
//!
//! The state is advanced with fixed RK4 steps. After each step the end state
//! is tested for, in priority order: obstacle collision, leaving the state
//! box, entering a labeled region (`G_R`), and entering an unvisited
//! observation region (`G_T`). A triggered predicate is localized by bisecting
//! the step length until the bracket is narrower than the event tolerance; the
//! earliest event wins, simultaneous events go by priority and then lowest id.
//!
//! Regions that contain the start state are ignored until the trajectory has
//! left them, so a node created on a guard does not fire the same guard again.

use serde::{Deserialize, Serialize};

use crate::model::{MemoryVector, Scenario, StateVec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum Outcome {
    FullDuration,
    HitRegion(usize),
    HitObservation(usize),
    Collided,
    LeftBounds,
    /// Nothing usable happened, e.g. the exit budget ran out.
    Degenerate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropagationResult {
    pub outcome: Outcome,
    pub x_end: StateVec,
    pub t_actual: f64,
}

/// Event classes in priority order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Event {
    Collision,
    Bounds,
    Region(usize),
    Observation(usize),
}

struct Guards<'a> {
    s: &'a Scenario,
    m: MemoryVector,
    ignored_regions: u64,
    ignored_obs: u64,
}

impl Guards<'_> {
    fn fresh_regions(&self, x: &[f64]) -> u64 {
        self.s.regions_containing(x) & !self.ignored_regions
    }

    fn fresh_observations(&self, x: &[f64]) -> u64 {
        self.s.observation_regions_containing(x) & !self.ignored_obs & !self.m.0
    }

    /// Drops ignored regions that no longer contain `x`.
    fn release(&mut self, x: &[f64]) {
        self.ignored_regions &= self.s.regions_containing(x);
        self.ignored_obs &= self.s.observation_regions_containing(x);
    }

    fn triggered(&self, x: &[f64]) -> Vec<Event> {
        let mut out = Vec::new();
        if self.s.in_obstacle(x) {
            out.push(Event::Collision);
        }
        if self.s.out_of_bounds(x) {
            out.push(Event::Bounds);
        }
        let mut r = self.fresh_regions(x);
        while r != 0 {
            out.push(Event::Region(r.trailing_zeros() as usize));
            r &= r - 1;
        }
        let mut o = self.fresh_observations(x);
        while o != 0 {
            out.push(Event::Observation(o.trailing_zeros() as usize));
            o &= o - 1;
        }
        out
    }

    fn holds(&self, ev: Event, x: &[f64]) -> bool {
        match ev {
            Event::Collision => self.s.in_obstacle(x),
            Event::Bounds => self.s.out_of_bounds(x),
            Event::Region(i) => self.fresh_regions(x) >> i & 1 == 1,
            Event::Observation(i) => self.fresh_observations(x) >> i & 1 == 1,
        }
    }
}

/// Integrates `x0` under constant `u` for up to `t_req`, stopping at the
/// first guard crossing.
pub fn propagate(s: &Scenario, x0: &[f64], m: MemoryVector, u: &[f64], t_req: f64) -> PropagationResult {
    propagate_with_step(s, x0, m, u, t_req, s.integration_step())
}

pub fn propagate_with_step(
    s: &Scenario,
    x0: &[f64],
    m: MemoryVector,
    u: &[f64],
    t_req: f64,
    h: f64,
) -> PropagationResult {
    if !(t_req > 0.0 && t_req.is_finite()) {
        return PropagationResult {
            outcome: Outcome::Degenerate,
            x_end: x0.iter().copied().collect(),
            t_actual: 0.0,
        };
    }
    let tol = s.planning.event_tolerance;
    let mut guards = Guards {
        s,
        m,
        ignored_regions: s.regions_containing(x0),
        ignored_obs: s.observation_regions_containing(x0),
    };
    let steps = (t_req / h - 1e-9).ceil().max(1.0) as usize;
    let mut x: StateVec = x0.iter().copied().collect();
    for k in 0..steps {
        let t0 = k as f64 * h;
        let dt = if k + 1 == steps { t_req - t0 } else { h };
        let x1 = s.dynamics.rk4_step(&x, u, dt);
        let mut after = Guards { ..guards };
        after.release(&x1);
        let events = after.triggered(&x1);
        if events.is_empty() {
            guards = after;
            x = x1;
            continue;
        }
        // Localize each triggered predicate inside this step. The ignore set
        // at the start of the step is kept: a region exited and re-entered
        // within one step is not resolved.
        let mut best: Option<(f64, Event, StateVec)> = None;
        for ev in events {
            let (tau, xe) = bisect(s, &x, u, dt, tol, |y| {
                let mut g = Guards { ..guards };
                g.release(y);
                g.holds(ev, y)
            });
            let better = match &best {
                None => true,
                Some((bt, bev, _)) => tau < *bt || (tau == *bt && ev < *bev),
            };
            if better {
                best = Some((tau, ev, xe));
            }
        }
        let (tau, ev, x_end) = best.expect("at least one event");
        let outcome = match ev {
            Event::Collision => Outcome::Collided,
            Event::Bounds => Outcome::LeftBounds,
            Event::Region(i) => {
                // A sensing region entered at the same instant composes with
                // the region jump; report it as the observation event.
                let mut g = Guards { ..guards };
                g.release(&x_end);
                let obs = g.fresh_observations(&x_end);
                if obs != 0 {
                    Outcome::HitObservation(obs.trailing_zeros() as usize)
                } else {
                    Outcome::HitRegion(i)
                }
            }
            Event::Observation(i) => Outcome::HitObservation(i),
        };
        return PropagationResult {
            outcome,
            x_end,
            t_actual: t0 + tau,
        };
    }
    PropagationResult {
        outcome: Outcome::FullDuration,
        x_end: x,
        t_actual: t_req,
    }
}

/// Smallest step length in `(0, dt]` at which `pred` holds, to within `tol`.
/// `pred` must hold at `dt` and is assumed false at 0.
fn bisect(
    s: &Scenario,
    x: &[f64],
    u: &[f64],
    dt: f64,
    tol: f64,
    pred: impl Fn(&[f64]) -> bool,
) -> (f64, StateVec) {
    let (mut lo, mut hi) = (0.0, dt);
    let mut x_hi = s.dynamics.rk4_step(x, u, dt);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let xm = s.dynamics.rk4_step(x, u, mid);
        if pred(&xm) {
            hi = mid;
            x_hi = xm;
        } else {
            lo = mid;
        }
    }
    (hi, x_hi)
}

/// Integrates until the state leaves every labeled and sensing region that
/// contains `x0`, returning the first outside state and the elapsed time.
/// `None` when the step budget runs out first.
pub fn exit_current_region(s: &Scenario, x0: &[f64], u: &[f64]) -> Option<(StateVec, f64)> {
    let h = s.integration_step();
    let inside = |y: &[f64], r: u64, o: u64| (s.regions_containing(y) & r) != 0 || (s.observation_regions_containing(y) & o) != 0;
    let (r0, o0) = (s.regions_containing(x0), s.observation_regions_containing(x0));
    let mut x: StateVec = x0.iter().copied().collect();
    for k in 0..s.planning.exit_step_budget {
        if !inside(&x, r0, o0) {
            return Some((x, k as f64 * h));
        }
        x = s.dynamics.rk4_step(&x, u, h);
        if s.out_of_bounds(&x) {
            return None;
        }
    }
    (!inside(&x, r0, o0)).then(|| (x, s.planning.exit_step_budget as f64 * h))
}
