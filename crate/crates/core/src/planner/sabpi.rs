//! Bandit-guided policy iteration: select a policy subtree with UCB-ST, grow
//! it with `k` sampled expansions, repeat.

use std::collections::HashMap;

use rand::Rng;

use super::spatial::SpatialIndex;
use super::{Run, Selection, Termination};
use crate::belief::HybridBelief;
use crate::tree::{NodeId, PolicyTree};

pub(crate) fn run(run: &mut Run, mut observer: impl FnMut(&PolicyTree, u64)) -> Termination {
    loop {
        if let Some(t) = run.termination() {
            return t;
        }
        let policy = run.tree.ucb_st(run.cfg.c, true);
        let mut frontier = Frontier::new(run, policy.nodes);
        let mut timed_out = false;
        for _ in 0..run.cfg.k {
            let Some(node) = frontier.pick(run) else { break };
            let (u, t) = run.sample_control();
            if let Some(children) = run.expand(node, u, t) {
                // The arm joins the selected subtree, which counts as its
                // first selection; otherwise fresh arms always outrank
                // grown ones and selection never leaves the root.
                let arm = run.tree.node(node).arms.len() - 1;
                run.tree.count_pull(node, arm);
                for c in children {
                    if run.tree.node(c).is_expandable() {
                        frontier.insert(run, c);
                    }
                }
            }
            if run.tree.root().solved || run.tree.len() >= run.cfg.max_nodes {
                break;
            }
            if run.expansions % 64 == 0 && run.out_of_time() {
                timed_out = true;
                break;
            }
        }
        run.iterations += 1;
        run.sample();
        observer(&run.tree, run.iterations);
        if timed_out {
            return Termination::TimeLimit;
        }
    }
}

/// Discrete part of a belief: sensing memory and the exact `(q, e, p)` table.
type Mode = (u64, Vec<(u32, u32, u64)>);

fn mode(b: &HybridBelief) -> Mode {
    (b.memory.0, b.entries().iter().map(|e| (e.q, e.e.0, e.p.to_bits())).collect())
}

/// Expandable nodes of the selected subtree plus everything grown from it
/// during the current batch.
enum Frontier {
    Uniform(Vec<NodeId>),
    Voronoi(SpatialIndex),
    Hybrid {
        lookup: HashMap<Mode, usize>,
        /// One index per mode; `None` once it ran out of expandable nodes.
        modes: Vec<Option<SpatialIndex>>,
        live: usize,
    },
}

impl Frontier {
    fn new(run: &Run, nodes: Vec<NodeId>) -> Self {
        let nodes: Vec<NodeId> = nodes.into_iter().filter(|&n| run.tree.node(n).is_expandable()).collect();
        let mut f = match run.cfg.selection {
            Selection::Uniform => return Frontier::Uniform(nodes),
            Selection::Voronoi => Frontier::Voronoi(SpatialIndex::new(&run.s.position_bounds(), nodes.len().clamp(16, 4096))),
            Selection::HybridVoronoi => Frontier::Hybrid {
                lookup: HashMap::new(),
                modes: Vec::new(),
                live: 0,
            },
        };
        for n in nodes {
            f.insert(run, n);
        }
        f
    }

    fn insert(&mut self, run: &Run, id: NodeId) {
        let b = &run.tree.node(id).belief;
        match self {
            Frontier::Uniform(pool) => pool.push(id),
            Frontier::Voronoi(idx) => idx.insert(id, &run.s.position(&b.x)),
            Frontier::Hybrid { lookup, modes, live } => {
                let slot = *lookup.entry(mode(b)).or_insert_with(|| {
                    modes.push(None);
                    modes.len() - 1
                });
                let idx = modes[slot].get_or_insert_with(|| {
                    *live += 1;
                    SpatialIndex::new(&run.s.position_bounds(), 256)
                });
                idx.insert(id, &run.s.position(&b.x));
            }
        }
    }

    /// Next node to expand; nodes solved earlier in the batch are skipped.
    fn pick(&mut self, run: &mut Run) -> Option<NodeId> {
        match self {
            Frontier::Uniform(pool) => {
                while !pool.is_empty() {
                    let n = pool[run.rng.gen_range(0..pool.len())];
                    if run.tree.node(n).is_expandable() {
                        return Some(n);
                    }
                    pool.retain(|&n| run.tree.node(n).is_expandable());
                }
                None
            }
            Frontier::Voronoi(idx) => {
                let target = run.sample_position();
                let tree = &run.tree;
                idx.nearest(&target, |n| tree.node(n).is_expandable(), &mut run.rng)
            }
            Frontier::Hybrid { modes, live, .. } => {
                while *live > 0 {
                    let slot = run.rng.gen_range(0..modes.len());
                    let Some(idx) = &modes[slot] else { continue };
                    let target = run.sample_position();
                    let tree = &run.tree;
                    if let Some(n) = idx.nearest(&target, |n| tree.node(n).is_expandable(), &mut run.rng) {
                        return Some(n);
                    }
                    modes[slot] = None;
                    *live -= 1;
                }
                None
            }
        }
    }
}
