//! Serialized executable policies.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::belief::BeliefDocument;
use crate::model::Scenario;
use crate::propagate::Outcome;
use crate::tree::{NodeId, PolicySubtree, PolicyTree};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyArtifact {
    pub scenario: String,
    pub algorithm: String,
    /// Root value of the policy: a lower bound on its success probability.
    pub value: f64,
    /// Node 0 is the root; children always have larger ids.
    pub nodes: Vec<PolicyNode>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyNode {
    pub id: usize,
    pub belief: BeliefDocument,
    pub value: f64,
    pub acc_mass: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arm: Option<PolicyArm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyArm {
    pub u: Vec<f64>,
    /// Requested propagation duration. Replaying `u` for this long stops at
    /// the recorded event.
    pub duration: f64,
    pub t_actual: f64,
    pub outcome: Outcome,
    pub q: f64,
    pub children: Vec<PolicyEdge>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyEdge {
    pub prob: f64,
    pub child: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observation: Option<ObservationLabel>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObservationLabel {
    pub region: usize,
    pub symbol: usize,
    pub name: String,
}

impl PolicyArtifact {
    /// Serializes the greedy policy of `tree`.
    pub fn from_tree(tree: &PolicyTree, s: &Scenario, algorithm: &str) -> Self {
        Self::from_subtree(tree, &tree.extract(), s, algorithm)
    }

    pub fn from_subtree(tree: &PolicyTree, policy: &PolicySubtree, s: &Scenario, algorithm: &str) -> Self {
        // Breadth-first renumbering from the root.
        let mut order: Vec<NodeId> = vec![PolicyTree::ROOT];
        let mut index = std::collections::HashMap::new();
        index.insert(PolicyTree::ROOT, 0usize);
        let mut head = 0;
        while head < order.len() {
            let id = order[head];
            head += 1;
            if let Some(a) = policy.chosen_arm(id) {
                for e in &tree.node(id).arms[a].children {
                    index.insert(e.child, order.len());
                    order.push(e.child);
                }
            }
        }
        let nodes = order
            .iter()
            .enumerate()
            .map(|(new_id, &id)| {
                let n = tree.node(id);
                let arm = policy.chosen_arm(id).map(|a| {
                    let arm = &n.arms[a];
                    PolicyArm {
                        u: arm.u.to_vec(),
                        duration: arm.t_req,
                        t_actual: arm.t_actual,
                        outcome: arm.outcome,
                        q: arm.q,
                        children: arm
                            .children
                            .iter()
                            .map(|e| PolicyEdge {
                                prob: e.prob,
                                child: index[&e.child],
                                observation: e.observation.map(|(region, symbol)| ObservationLabel {
                                    region,
                                    symbol,
                                    name: s.observation_name(region, symbol),
                                }),
                            })
                            .collect(),
                    }
                });
                PolicyNode {
                    id: new_id,
                    belief: n.belief.to_document(),
                    value: arm.as_ref().map_or(n.acc, |a| a.q.max(n.acc)),
                    acc_mass: n.acc,
                    arm,
                }
            })
            .collect::<Vec<_>>();
        PolicyArtifact {
            scenario: s.name.clone(),
            algorithm: algorithm.to_string(),
            value: nodes[0].value,
            nodes,
        }
    }

    /// Success probability of the stored policy computed from its leaves:
    /// path probability times leaf acceptance mass, summed.
    pub fn analytic_value(&self) -> f64 {
        let mut v = vec![0.0; self.nodes.len()];
        for n in self.nodes.iter().rev() {
            v[n.id] = match &n.arm {
                None => n.acc_mass,
                Some(a) => {
                    let mut q = 0.0;
                    for e in &a.children {
                        q += e.prob * v[e.child];
                    }
                    q.max(n.acc_mass)
                }
            };
        }
        v[0]
    }

    /// Observation regions sensed anywhere in the policy.
    pub fn sensed_regions(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .nodes
            .iter()
            .filter_map(|n| n.arm.as_ref())
            .filter_map(|a| match a.outcome {
                Outcome::HitObservation(r) => Some(r),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Semantic regions whose hidden propositions the policy observes.
    pub fn observed_targets(&self, s: &Scenario) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .sensed_regions()
            .into_iter()
            .map(|r| s.observation_regions[r].target)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The first labeled region entered along the most probable branch.
    pub fn first_committed_region(&self) -> Option<usize> {
        let mut node = 0;
        loop {
            let arm = self.nodes[node].arm.as_ref()?;
            if let Outcome::HitRegion(r) = arm.outcome {
                return Some(r);
            }
            node = arm
                .children
                .iter()
                .max_by(|a, b| a.prob.total_cmp(&b.prob).then(b.child.cmp(&a.child)))?
                .child;
        }
    }

    pub fn save(&self, path: impl AsRef<Path>) -> std::io::Result<()> {
        let json = serde_json::to_string_pretty(self).map_err(std::io::Error::other)?;
        std::fs::write(path, json)
    }

    pub fn load(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(std::io::Error::other)
    }
}
