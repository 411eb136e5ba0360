//! Monte-Carlo tree search with progressive widening over continuous
//! controls. Arms are chosen by UCB1 on sampled rollout returns; one arm is
//! added per simulation when widening allows. The reported value is still the
//! exact backed-up tree value.

use std::collections::HashMap;

use rand::Rng;

use super::{arm_children, sample_control, Run, Termination};
use crate::belief::HybridBelief;
use crate::propagate::propagate;
use crate::tree::{NodeId, PolicyTree};

pub(crate) fn run(run: &mut Run, mut observer: impl FnMut(&PolicyTree, u64)) -> Termination {
    // Sum of sampled returns per (node, arm).
    let mut returns: HashMap<(NodeId, usize), f64> = HashMap::new();
    loop {
        if let Some(t) = run.termination() {
            return t;
        }
        let mut path: Vec<(NodeId, Option<usize>)> = Vec::new();
        let mut node = PolicyTree::ROOT;
        let ret = loop {
            let n = run.tree.node(node);
            if !n.is_expandable() {
                path.push((node, None));
                break n.value;
            }
            let visits = n.visits + 1;
            if n.arms.is_empty() || n.arms.len() < run.cfg.widening_limit(visits) {
                let (u, t) = run.sample_control();
                match run.expand(node, u, t) {
                    Some(_) => {
                        let arm = run.tree.node(node).arms.len() - 1;
                        path.push((node, Some(arm)));
                        let leaf = pick_child(run, node, arm);
                        path.push((leaf, None));
                        let b = run.tree.node(leaf).belief.clone();
                        break rollout(run, b);
                    }
                    None => {
                        path.push((node, None));
                        let b = run.tree.node(node).belief.clone();
                        break rollout(run, b);
                    }
                }
            }
            let arm = select_arm(run, node, visits, &returns);
            path.push((node, Some(arm)));
            node = pick_child(run, node, arm);
        };
        for (id, arm) in path {
            run.tree.record_visit(id, arm);
            if let Some(a) = arm {
                *returns.entry((id, a)).or_insert(0.0) += ret;
            }
        }
        run.iterations += 1;
        run.sample();
        observer(&run.tree, run.iterations);
        if run.iterations % 64 == 0 && run.out_of_time() {
            return Termination::TimeLimit;
        }
    }
}

fn select_arm(run: &Run, node: NodeId, visits: u64, returns: &HashMap<(NodeId, usize), f64>) -> usize {
    let n = run.tree.node(node);
    let ln = (visits as f64).ln();
    let mut best = (0, f64::NEG_INFINITY);
    for (i, a) in n.arms.iter().enumerate() {
        let score = if a.pulls == 0 {
            f64::INFINITY
        } else {
            let mean = returns.get(&(node, i)).copied().unwrap_or(0.0) / a.pulls as f64;
            mean + run.cfg.mcts_c * (2.0 * ln / a.pulls as f64).sqrt()
        };
        if score > best.1 {
            best = (i, score);
        }
    }
    best.0
}

/// Samples an outcome of `arm` by its edge probabilities.
fn pick_child(run: &mut Run, node: NodeId, arm: usize) -> NodeId {
    let r: f64 = run.rng.gen();
    let edges = &run.tree.node(node).arms[arm].children;
    let mut acc = 0.0;
    for e in edges {
        acc += e.prob;
        if r < acc {
            return e.child;
        }
    }
    edges.last().unwrap().child
}

/// Random controls for a bounded number of steps; returns the acceptance
/// mass of the belief reached.
fn rollout(run: &mut Run, mut b: HybridBelief) -> f64 {
    let s = run.s;
    for _ in 0..run.cfg.rollout_depth {
        if b.is_settled(&s.dfa) {
            break;
        }
        let (u, t) = sample_control(s, &mut run.rng);
        let r = propagate(s, &b.x, b.memory, &u, t);
        let Some(children) = arm_children(s, &b, r.outcome, r.x_end) else { continue };
        let x: f64 = run.rng.gen();
        let mut acc = 0.0;
        let mut next = None;
        for c in &children {
            acc += c.prob;
            if x < acc {
                next = Some(c.belief.clone());
                break;
            }
        }
        b = next.unwrap_or_else(|| children.last().unwrap().belief.clone());
    }
    b.acc_mass(&s.dfa)
}
