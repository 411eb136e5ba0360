//! Kinodynamic RRT in the hybrid belief space: Voronoi-biased node choice
//! over the whole tree, random controls, every observation outcome
//! instantiated, no bandit selection.

use super::spatial::SpatialIndex;
use super::{Run, Termination};
use crate::tree::{PolicyTree, NodeId};

/// Expansions between observer callbacks.
const BATCH: usize = 1000;

pub(crate) fn run(run: &mut Run, mut observer: impl FnMut(&PolicyTree, u64)) -> Termination {
    let mut index = SpatialIndex::new(&run.s.position_bounds(), 4096);
    let root: NodeId = PolicyTree::ROOT;
    index.insert(root, &run.s.position(&run.tree.node(root).belief.x));
    loop {
        if let Some(t) = run.termination() {
            return t;
        }
        for _ in 0..BATCH {
            let target = run.sample_position();
            let tree = &run.tree;
            let Some(node) = index.nearest(&target, |n| tree.node(n).is_expandable(), &mut run.rng) else {
                break;
            };
            let (u, t) = run.sample_control();
            if let Some(children) = run.expand(node, u, t) {
                for c in children {
                    if run.tree.node(c).is_expandable() {
                        index.insert(c, &run.s.position(&run.tree.node(c).belief.x));
                    }
                }
            }
            if run.tree.root().solved || run.tree.len() >= run.cfg.max_nodes {
                break;
            }
            if run.expansions % 64 == 0 && run.out_of_time() {
                break;
            }
        }
        run.iterations += 1;
        run.sample();
        observer(&run.tree, run.iterations);
    }
}
