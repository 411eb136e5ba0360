//! Monte-Carlo execution of stored policies against sampled ground truth,
//! a brute-force optimal-value oracle for small grid instances, and batch
//! benchmarking.

mod bench;
pub mod oracle;

pub use bench::{benchmark, convergence_report, BenchmarkRow, ConvergenceTable};
pub use oracle::{OracleInstance, oracle_optimal_value};

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::artifact::PolicyArtifact;
use crate::belief::{BeliefDocument, HybridBelief};
use crate::error::EvalError;
use crate::ltlf::StateId;
use crate::model::{EnvHypothesis, MemoryVector, Scenario, StateVec};
use crate::propagate::{propagate, Outcome};

/// Two-sided 95% normal quantile.
const Z95: f64 = 1.959_963_984_540_054;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    Violated,
    /// A policy leaf was reached before the task was decided.
    PolicyExhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub time: f64,
    pub x: Vec<f64>,
    pub event: Outcome,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observation: Option<String>,
    /// Planner's DFA-state marginal at the node reached.
    pub q_marginal: Vec<(u32, f64)>,
    /// True DFA state after the event.
    pub q: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecutionTrace {
    pub hypothesis: u32,
    pub events: Vec<TraceEvent>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExecutionSummary {
    pub trials: u64,
    pub satisfied: u64,
    pub violated: u64,
    pub exhausted: u64,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Value the planner reported for the policy.
    pub reported_value: f64,
}

/// Wilson score interval for `k` successes in `n` trials at 95%.
pub fn wilson_interval(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Checks that the policy was planned from `s`'s initial belief.
pub fn check_policy(s: &Scenario, p: &PolicyArtifact) -> Result<(), EvalError> {
    let root = p
        .nodes
        .first()
        .ok_or_else(|| EvalError::PolicyMismatch("policy has no nodes".into()))?;
    let expected = HybridBelief::initial(s).to_document();
    if !same_belief(&root.belief, &expected) {
        return Err(EvalError::PolicyMismatch(format!(
            "root belief of policy for '{}' differs from the initial belief of '{}'",
            p.scenario, s.name
        )));
    }
    for n in &p.nodes {
        if let Some(a) = &n.arm {
            if a.u.len() != s.control_bounds.dim() {
                return Err(EvalError::PolicyMismatch(format!("node {}: control has wrong dimension", n.id)));
            }
            if a.children.iter().any(|e| e.child <= n.id || e.child >= p.nodes.len()) {
                return Err(EvalError::PolicyMismatch(format!("node {}: bad child index", n.id)));
            }
        }
    }
    Ok(())
}

fn same_belief(a: &BeliefDocument, b: &BeliefDocument) -> bool {
    a.memory == b.memory
        && a.x.len() == b.x.len()
        && a.x.iter().zip(&b.x).all(|(p, q)| (p - q).abs() <= 1e-9)
        && a.dist.len() == b.dist.len()
        && a.dist.iter().zip(&b.dist).all(|(p, q)| p.0 == q.0 && (p.1 - q.1).abs() <= 1e-9)
}

fn sample_hypothesis(s: &Scenario, rng: &mut impl Rng) -> EnvHypothesis {
    let prior = s.hypotheses.prior();
    let r: f64 = rng.gen();
    let mut acc = 0.0;
    for &(e, p) in prior {
        acc += p;
        if r < acc {
            return e;
        }
    }
    prior.last().expect("non-empty prior").0
}

fn step(s: &Scenario, q: StateId, x: &[f64], e: EnvHypothesis) -> StateId {
    if s.dfa.is_accepting(q) {
        q
    } else {
        s.dfa.step(q, s.label_at(x, e))
    }
}

/// Runs one trial of `p` under the true hypothesis `e`.
pub fn execute_once(s: &Scenario, p: &PolicyArtifact, e: EnvHypothesis, rng: &mut impl Rng) -> Result<ExecutionTrace, EvalError> {
    let mut x: StateVec = s.x0.clone();
    let mut m: MemoryVector = s.m0;
    let mut q = step(s, s.dfa.initial(), &x, e);
    let mut node = 0usize;
    let mut time = 0.0;
    let mut events = Vec::new();
    let verdict = loop {
        if s.dfa.is_accepting(q) {
            break Verdict::Satisfied;
        }
        if s.dfa.is_trap(q) {
            break Verdict::Violated;
        }
        let Some(arm) = &p.nodes[node].arm else {
            break Verdict::PolicyExhausted;
        };
        let r = propagate(s, &x, m, &arm.u, arm.duration);
        if r.outcome != arm.outcome {
            return Err(EvalError::PolicyMismatch(format!(
                "node {node}: replay produced {:?}, policy recorded {:?}",
                r.outcome, arm.outcome
            )));
        }
        x = r.x_end;
        time += r.t_actual;
        let mut observation = None;
        let next = match r.outcome {
            Outcome::FullDuration => arm.children[0].child,
            Outcome::HitRegion(_) | Outcome::Collided | Outcome::LeftBounds => {
                q = step(s, q, &x, e);
                arm.children[0].child
            }
            Outcome::HitObservation(region) => {
                q = step(s, q, &x, e);
                let n = s.observation_regions[region].num_symbols();
                let u: f64 = rng.gen();
                let mut acc = 0.0;
                let mut symbol = n - 1;
                for o in 0..n {
                    acc += s.obs_likelihood(region, e, m, o)?;
                    if u < acc {
                        symbol = o;
                        break;
                    }
                }
                m = m.update(region);
                observation = Some(s.observation_name(region, symbol));
                match arm
                    .children
                    .iter()
                    .find(|c| c.observation.as_ref().is_some_and(|o| o.symbol == symbol))
                {
                    Some(c) => c.child,
                    // The planner pruned this symbol as (numerically) impossible.
                    None => {
                        events.push(TraceEvent {
                            time,
                            x: x.to_vec(),
                            event: r.outcome,
                            observation,
                            q_marginal: Vec::new(),
                            q: q as u32,
                        });
                        break Verdict::PolicyExhausted;
                    }
                }
            }
            Outcome::Degenerate => {
                return Err(EvalError::PolicyMismatch(format!("node {node}: degenerate arm")));
            }
        };
        node = next;
        events.push(TraceEvent {
            time,
            x: x.to_vec(),
            event: r.outcome,
            observation,
            q_marginal: HybridBelief::from_document(&p.nodes[node].belief).state_marginal(),
            q: q as u32,
        });
    };
    Ok(ExecutionTrace {
        hypothesis: e.0,
        events,
        verdict,
    })
}

/// Executes `p` for `trials` independent trials. Each trace is written to
/// `traces` as one JSON line when given.
pub fn execute_policy(
    s: &Scenario,
    p: &PolicyArtifact,
    trials: u64,
    seed: u64,
    mut traces: Option<&mut dyn Write>,
) -> Result<ExecutionSummary, EvalError> {
    check_policy(s, p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sat, mut vio, mut exh) = (0, 0, 0);
    for _ in 0..trials {
        let e = sample_hypothesis(s, &mut rng);
        let trace = execute_once(s, p, e, &mut rng)?;
        match trace.verdict {
            Verdict::Satisfied => sat += 1,
            Verdict::Violated => vio += 1,
            Verdict::PolicyExhausted => exh += 1,
        }
        if let Some(w) = traces.as_deref_mut() {
            serde_json::to_writer(&mut *w, &trace)?;
            w.write_all(b"\n")?;
        }
    }
    let (ci_low, ci_high) = wilson_interval(sat, trials);
    Ok(ExecutionSummary {
        trials,
        satisfied: sat,
        violated: vio,
        exhausted: exh,
        rate: if trials == 0 { 0.0 } else { sat as f64 / trials as f64 },
        ci_low,
        ci_high,
        reported_value: p.value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_matches_closed_form() {
        // k = 50 of n = 100: center 0.5, half-width z*sqrt(0.25/100 + z^2/40000)/(1 + z^2/100).
        let (lo, hi) = wilson_interval(50, 100);
        let z2 = Z95 * Z95;
        let half = Z95 * (0.0025 + z2 / 40000.0).sqrt() / (1.0 + z2 / 100.0);
        assert!((lo - (0.5 - half)).abs() < 1e-12);
        assert!((hi - (0.5 + half)).abs() < 1e-12);
        let (lo, hi) = wilson_interval(100, 100);
        assert!(hi == 1.0 && lo > 0.96 && lo < 0.97);
    }
}
