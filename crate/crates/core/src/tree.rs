//! The AND/OR search tree.
//!
//! OR nodes hold beliefs and choose among control arms; each arm is an AND
//! node whose children are the observation outcomes (or a single child for a
//! deterministic jump). Values are exact expectations:
//! `Q(arm) = sum_w w * V(child)` and `V(node) = max(acc_mass, max_arm Q)`.

use std::sync::Arc;

use crate::belief::HybridBelief;
use crate::ltlf::Dfa;
use crate::model::StateVec;
use crate::propagate::Outcome;

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub prob: f64,
    pub child: NodeId,
    /// `(observation region, symbol)` selecting this child, if any.
    pub observation: Option<(usize, usize)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Arm {
    pub u: StateVec,
    /// Sampled duration; replaying it reproduces the recorded event exactly.
    pub t_req: f64,
    /// Time until the propagation stopped.
    pub t_actual: f64,
    pub outcome: Outcome,
    pub pulls: u64,
    pub children: Vec<Edge>,
    pub q: f64,
}

#[derive(Clone, Debug)]
pub struct Node {
    pub belief: HybridBelief,
    pub visits: u64,
    pub arms: Vec<Arm>,
    pub value: f64,
    /// `acc_mass` of the belief.
    pub acc: f64,
    pub parent: Option<(NodeId, usize)>,
    /// Some policy below this node succeeds with certainty.
    pub solved: bool,
    /// All mass is in trap states.
    pub doomed: bool,
    /// All mass is accepting or trapped; nothing further can change.
    pub settled: bool,
}

impl Node {
    pub fn is_expandable(&self) -> bool {
        !(self.solved || self.doomed || self.settled)
    }
}

/// One outcome of an arm, before it becomes a node.
#[derive(Clone, Debug)]
pub struct NewChild {
    pub prob: f64,
    pub belief: HybridBelief,
    pub observation: Option<(usize, usize)>,
}

/// A policy: one chosen arm per reached internal node, closed under the
/// chosen arms' children. `nodes` is in depth-first order starting at the root.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolicySubtree {
    pub nodes: Vec<NodeId>,
    pub choice: Vec<(NodeId, usize)>,
}

impl PolicySubtree {
    pub fn chosen_arm(&self, node: NodeId) -> Option<usize> {
        self.choice.iter().find(|(n, _)| *n == node).map(|&(_, a)| a)
    }
}

/// UCB1 score; unpulled arms score `+inf`, `c = 0` returns `Q` exactly.
pub fn ucb_score(q: f64, node_visits: u64, arm_pulls: u64, c: f64) -> f64 {
    if arm_pulls == 0 {
        return f64::INFINITY;
    }
    if c == 0.0 {
        return q;
    }
    q + c * (2.0 * (node_visits as f64).ln() / arm_pulls as f64).sqrt()
}

#[derive(Clone, Debug)]
pub struct PolicyTree {
    dfa: Arc<Dfa>,
    nodes: Vec<Node>,
}

impl PolicyTree {
    pub fn new(root: HybridBelief, dfa: Arc<Dfa>) -> Self {
        let mut t = PolicyTree { dfa, nodes: Vec::new() };
        t.push_node(root, None);
        t
    }

    fn push_node(&mut self, belief: HybridBelief, parent: Option<(NodeId, usize)>) -> NodeId {
        let acc = belief.acc_mass(&self.dfa);
        let doomed = belief.is_doomed(&self.dfa);
        let settled = belief.is_settled(&self.dfa);
        let solved = belief.entries().iter().all(|b| self.dfa.is_accepting(b.q as usize));
        self.nodes.push(Node {
            belief,
            visits: 0,
            arms: Vec::new(),
            value: acc,
            acc,
            parent,
            solved,
            doomed,
            settled,
        });
        self.nodes.len() - 1
    }

    pub fn dfa(&self) -> &Dfa {
        &self.dfa
    }

    pub const ROOT: NodeId = 0;

    pub fn root(&self) -> &Node {
        &self.nodes[0]
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn num_arms(&self) -> usize {
        self.nodes.iter().map(|n| n.arms.len()).sum()
    }

    /// Appends an arm with its children and backs up values to the root.
    /// Returns the new child ids.
    pub fn add_arm(
        &mut self,
        node: NodeId,
        u: StateVec,
        t_req: f64,
        t_actual: f64,
        outcome: Outcome,
        children: Vec<NewChild>,
    ) -> Vec<NodeId> {
        assert!(!children.is_empty(), "an arm needs at least one child");
        let arm_index = self.nodes[node].arms.len();
        let mut edges = Vec::with_capacity(children.len());
        for c in children {
            let id = self.push_node(c.belief, Some((node, arm_index)));
            edges.push(Edge {
                prob: c.prob,
                child: id,
                observation: c.observation,
            });
        }
        let ids = edges.iter().map(|e| e.child).collect();
        self.nodes[node].arms.push(Arm {
            u,
            t_req,
            t_actual,
            outcome,
            pulls: 0,
            children: edges,
            q: 0.0,
        });
        self.recompute_arm(node, arm_index);
        self.backpropagate(node);
        ids
    }

    fn recompute_arm(&mut self, node: NodeId, arm: usize) {
        let (q, solved) = arm_value(&self.nodes, &self.nodes[node].arms[arm]);
        let a = &mut self.nodes[node].arms[arm];
        a.q = q;
        if solved {
            self.nodes[node].solved = true;
        }
    }

    /// Recomputes `V` at `from` and walks towards the root, refreshing the
    /// owning arm's `Q` at each step. Stops once a node's value and solved
    /// flag are bitwise unchanged.
    pub fn backpropagate(&mut self, from: NodeId) {
        let mut id = from;
        loop {
            let n = &self.nodes[id];
            let v = node_value(n);
            let unchanged = v.to_bits() == n.value.to_bits();
            let was_solved = n.solved;
            self.nodes[id].value = v;
            let Some((parent, arm)) = self.nodes[id].parent else { break };
            if unchanged && id != from && !was_solved {
                break;
            }
            let before = self.nodes[parent].arms[arm].q.to_bits();
            let solved_before = self.nodes[parent].solved;
            self.recompute_arm(parent, arm);
            if before == self.nodes[parent].arms[arm].q.to_bits() && solved_before == self.nodes[parent].solved {
                break;
            }
            id = parent;
        }
    }

    /// Recursive selection: UCB1 arm choice at every reached node, descending
    /// into all children of the chosen arm. With `count` set, visit and pull
    /// counters are incremented along the way.
    pub fn ucb_st(&mut self, c: f64, count: bool) -> PolicySubtree {
        let mut out = PolicySubtree::default();
        let mut stack = vec![Self::ROOT];
        while let Some(id) = stack.pop() {
            out.nodes.push(id);
            if count {
                self.nodes[id].visits += 1;
            }
            let Some(best) = self.best_arm(id, c) else { continue };
            if count {
                self.nodes[id].arms[best].pulls += 1;
            }
            out.choice.push((id, best));
            stack.extend(self.nodes[id].arms[best].children.iter().rev().map(|e| e.child));
        }
        out
    }

    /// Counts a pass through `node` (and `arm`) for sampling-based search.
    pub fn record_visit(&mut self, node: NodeId, arm: Option<usize>) {
        let n = &mut self.nodes[node];
        n.visits += 1;
        if let Some(a) = arm {
            n.arms[a].pulls += 1;
        }
    }

    /// Counts one selection of `arm` without visiting `node` again.
    pub fn count_pull(&mut self, node: NodeId, arm: usize) {
        self.nodes[node].arms[arm].pulls += 1;
    }

    /// Read-only extraction: greedy in `Q`, counters untouched.
    pub fn extract(&self) -> PolicySubtree {
        let mut out = PolicySubtree::default();
        let mut stack = vec![Self::ROOT];
        while let Some(id) = stack.pop() {
            out.nodes.push(id);
            let Some(best) = self.best_arm(id, 0.0) else { continue };
            out.choice.push((id, best));
            stack.extend(self.nodes[id].arms[best].children.iter().rev().map(|e| e.child));
        }
        out
    }

    /// Highest UCB score, lowest index on ties.
    pub fn best_arm(&self, id: NodeId, c: f64) -> Option<usize> {
        let n = &self.nodes[id];
        let mut best: Option<(usize, f64)> = None;
        for (i, a) in n.arms.iter().enumerate() {
            let s = ucb_score(a.q, n.visits.max(1), a.pulls, c);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Value of a policy subtree evaluated from its leaves.
    pub fn policy_value(&self, p: &PolicySubtree) -> f64 {
        fn go(t: &PolicyTree, p: &PolicySubtree, id: NodeId) -> f64 {
            let n = &t.nodes[id];
            match p.chosen_arm(id) {
                None => n.acc,
                Some(a) => {
                    let q: f64 = n.arms[a].children.iter().map(|e| e.prob * go(t, p, e.child)).sum();
                    q.max(n.acc)
                }
            }
        }
        go(self, p, Self::ROOT)
    }

    /// Bottom-up recomputation of every `Q` and `V` from scratch, for
    /// checking the incremental backups. Returns `(V, [Q])` per node.
    pub fn recompute_all(&self) -> Vec<(f64, Vec<f64>)> {
        let mut values = vec![0.0; self.nodes.len()];
        let mut qs: Vec<Vec<f64>> = vec![Vec::new(); self.nodes.len()];
        // Children always have larger ids than their parents.
        for id in (0..self.nodes.len()).rev() {
            let n = &self.nodes[id];
            let mut v = n.acc;
            for a in &n.arms {
                let mut q = 0.0;
                for e in &a.children {
                    q += e.prob * values[e.child];
                }
                qs[id].push(q);
                v = v.max(q);
            }
            values[id] = v;
        }
        values.into_iter().zip(qs).collect()
    }
}

fn arm_value(nodes: &[Node], arm: &Arm) -> (f64, bool) {
    let mut q = 0.0;
    let mut solved = true;
    for e in &arm.children {
        q += e.prob * nodes[e.child].value;
        solved &= nodes[e.child].solved;
    }
    (q, solved)
}

fn node_value(n: &Node) -> f64 {
    n.arms.iter().fold(n.acc, |v, a| v.max(a.q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::BeliefEntry;
    use crate::ltlf::{compile_dfa, parse_ltlf, PropositionSet};
    use crate::model::{EnvHypothesis, MemoryVector};
    use smallvec::smallvec;

    // F(p): state 0 waiting, state 1 accepting.
    fn dfa() -> Arc<Dfa> {
        let ap = PropositionSet::new(["p", "bad"]).unwrap();
        let f = parse_ltlf("!bad U p", &ap).unwrap();
        Arc::new(compile_dfa(&f, &ap).unwrap())
    }

    fn belief(d: &Dfa, acc: f64, trap: f64) -> HybridBelief {
        let q_acc = d.accepting_states()[0] as u32;
        let q_trap = d.trap_states()[0] as u32;
        let q_wait = d.initial() as u32;
        let rest = 1.0 - acc - trap;
        let entries = [(q_acc, acc), (q_trap, trap), (q_wait, rest)]
            .into_iter()
            .filter(|(_, p)| *p > 0.0)
            .enumerate()
            .map(|(i, (q, p))| BeliefEntry {
                q,
                e: EnvHypothesis(i as u32),
                p,
            });
        HybridBelief::new(smallvec![0.0], MemoryVector::EMPTY, entries)
    }

    fn child(d: &Dfa, prob: f64, acc: f64, trap: f64) -> NewChild {
        NewChild {
            prob,
            belief: belief(d, acc, trap),
            observation: None,
        }
    }

    fn arm(t: &mut PolicyTree, node: NodeId, kids: Vec<NewChild>) -> Vec<NodeId> {
        t.add_arm(node, smallvec![0.0], 1.0, 1.0, Outcome::FullDuration, kids)
    }

    #[test]
    fn ucb_formula() {
        let s = ucb_score(0.5, 8, 2, 1.0);
        assert!((s - (0.5 + (2.0 * 8f64.ln() / 2.0).sqrt())).abs() < 1e-15);
        assert!((s - 1.9420).abs() < 1e-4);
        assert_eq!(ucb_score(0.3, 8, 2, 0.0), 0.3);
        assert!(ucb_score(0.3, 8, 1, 0.1) > ucb_score(0.3, 8, 5, 0.1));
        assert_eq!(ucb_score(0.0, 1, 0, 0.0), f64::INFINITY);
    }

    #[test]
    fn single_node_policy() {
        let d = dfa();
        let mut t = PolicyTree::new(belief(&d, 0.0, 0.0), d);
        let p = t.ucb_st(1.0, true);
        assert_eq!(p.nodes, vec![0]);
        assert!(p.choice.is_empty());
    }

    #[test]
    fn and_expansion_includes_all_children() {
        let d = dfa();
        let mut t = PolicyTree::new(belief(&d, 0.0, 0.0), d.clone());
        arm(&mut t, 0, vec![child(&d, 0.5, 0.0, 0.0), child(&d, 0.5, 0.0, 0.0)]);
        let p = t.ucb_st(1.0, true);
        assert_eq!(p.nodes, vec![0, 1, 2]);
        assert_eq!(p.choice, vec![(0, 0)]);
        assert_eq!(t.node(0).visits, 1);
        assert_eq!(t.node(0).arms[0].pulls, 1);
    }

    #[test]
    fn backup_examples() {
        let d = dfa();
        let mut t = PolicyTree::new(belief(&d, 0.0, 0.0), d.clone());
        let kids = arm(&mut t, 0, vec![child(&d, 0.7, 0.0, 0.0), child(&d, 0.3, 0.0, 0.0)]);
        assert_eq!(t.root().value, 0.0);
        // Leaf 0 -> 1 under weight 0.7.
        arm(&mut t, kids[0], vec![child(&d, 1.0, 1.0, 0.0)]);
        assert!((t.root().arms[0].q - 0.7).abs() < 1e-15);
        assert!((t.root().value - 0.7).abs() < 1e-15);
        assert!(t.node(kids[0]).solved);
        assert!(!t.root().solved);
        // A doomed arm changes nothing.
        arm(&mut t, 0, vec![child(&d, 1.0, 0.0, 1.0)]);
        assert!((t.root().value - 0.7).abs() < 1e-15);
        assert!(t.node(t.len() - 1).doomed);
        // Certainty along w = 1 edges solves every ancestor.
        let c = arm(&mut t, kids[1], vec![child(&d, 1.0, 0.0, 0.0)]);
        arm(&mut t, c[0], vec![child(&d, 1.0, 1.0, 0.0)]);
        assert!(t.root().solved);
        assert_eq!(t.root().value, 1.0);
    }

    /// Seven-node fixture: root with two arms, the first branching on an
    /// observation into two nodes that each have two arms.
    #[test]
    fn fixture_selection_matches_hand_argmax() {
        let d = dfa();
        let mut t = PolicyTree::new(belief(&d, 0.0, 0.0), d.clone());
        let ab = arm(&mut t, 0, vec![child(&d, 0.6, 0.0, 0.0), child(&d, 0.4, 0.0, 0.0)]);
        arm(&mut t, 0, vec![child(&d, 1.0, 0.5, 0.0)]);
        arm(&mut t, ab[0], vec![child(&d, 1.0, 0.5, 0.0)]);
        arm(&mut t, ab[0], vec![child(&d, 1.0, 0.9, 0.0)]);
        assert_eq!(t.len(), 6);
        arm(&mut t, ab[1], vec![child(&d, 1.0, 0.2, 0.0)]);
        assert_eq!(t.len(), 7);
        // Q(root, 0) = 0.6 * 0.9 + 0.4 * 0.2 = 0.62; Q(root, 1) = 0.5.
        assert!((t.root().arms[0].q - 0.62).abs() < 1e-12);
        // Set counts by hand: root N=10, pulls 8 / 2.
        t.nodes[0].visits = 9;
        t.nodes[0].arms[0].pulls = 8;
        t.nodes[0].arms[1].pulls = 2;
        t.nodes[ab[0]].visits = 7;
        t.nodes[ab[0]].arms[0].pulls = 1;
        t.nodes[ab[0]].arms[1].pulls = 6;
        // Root after increment N=10: arm0 0.62 + sqrt(2 ln10 / 8) * c, arm1 0.5 + sqrt(2 ln10/2) * c.
        // With c = 0.1: 0.62 + 0.0759 = 0.6959 vs 0.5 + 0.1517 = 0.6517 -> arm 0.
        // Node ab0 N=8: arm0 0.5 + 0.1 * sqrt(2 ln 8) = 0.7039, arm1 0.9 + 0.1 * sqrt(2 ln 8 / 6) = 0.9832 -> arm 1.
        // Node ab1 has an unpulled arm, which scores +inf.
        let p = t.ucb_st(0.1, true);
        assert_eq!(p.choice, vec![(0, 0), (ab[0], 1), (ab[1], 0)]);
        assert_eq!(p.nodes, vec![0, ab[0], 5, ab[1], 6]);
        // With c = 1 the root flips to the under-pulled arm.
        let p = t.ucb_st(1.0, false);
        assert_eq!(p.choice, vec![(0, 1)]);
        // Greedy extraction.
        let e = t.extract();
        assert_eq!(e.choice, vec![(0, 0), (ab[0], 1), (ab[1], 0)]);
        assert!((t.policy_value(&e) - t.root().value).abs() < 1e-15);
    }

    #[test]
    fn ties_go_to_lowest_index() {
        let d = dfa();
        let mut t = PolicyTree::new(belief(&d, 0.0, 0.0), d.clone());
        arm(&mut t, 0, vec![child(&d, 1.0, 0.3, 0.0)]);
        arm(&mut t, 0, vec![child(&d, 1.0, 0.3, 0.0)]);
        assert_eq!(t.best_arm(0, 0.0), Some(0));
        assert_eq!(t.extract().choice, vec![(0, 0)]);
    }

    #[test]
    fn extraction_does_not_count() {
        let d = dfa();
        let mut t = PolicyTree::new(belief(&d, 0.0, 0.0), d.clone());
        arm(&mut t, 0, vec![child(&d, 1.0, 0.3, 0.0)]);
        t.extract();
        t.ucb_st(0.0, false);
        assert_eq!(t.root().visits, 0);
        assert_eq!(t.root().arms[0].pulls, 0);
    }
}
