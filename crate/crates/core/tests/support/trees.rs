//! Random AND/OR trees for checking incremental backups.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sabpi::belief::{BeliefEntry, HybridBelief};
use sabpi::ltlf::{compile_dfa, parse_ltlf, Dfa, PropositionSet};
use sabpi::model::{EnvHypothesis, MemoryVector};
use sabpi::propagate::Outcome;
use sabpi::tree::{NewChild, PolicyTree};

use super::fixtures::random_simplex;

fn dfa() -> Arc<Dfa> {
    let ap = PropositionSet::new(["p", "bad"]).unwrap();
    Arc::new(compile_dfa(&parse_ltlf("!bad U p", &ap).unwrap(), &ap).unwrap())
}

/// A belief over (waiting, accepting, trap) with random masses; sometimes
/// fully accepting or fully trapped so that solved and doomed flags occur.
fn random_belief(d: &Dfa, rng: &mut impl Rng) -> HybridBelief {
    let states = [d.initial() as u32, d.accepting_states()[0] as u32, d.trap_states()[0] as u32];
    let masses = match rng.gen_range(0..10) {
        0 => vec![0.0, 1.0, 0.0],
        1 => vec![0.0, 0.0, 1.0],
        _ => random_simplex(rng, 3),
    };
    let entries = states.iter().zip(masses).enumerate().filter(|(_, (_, p))| *p > 0.0).map(|(i, (&q, p))| BeliefEntry {
        q,
        e: EnvHypothesis(i as u32),
        p,
    });
    HybridBelief::new([0.0].into_iter().collect(), MemoryVector::EMPTY, entries)
}

/// A tree grown by `insertions` random arms, each attached to a uniformly
/// chosen existing node.
pub fn random_tree(seed: u64, insertions: usize) -> PolicyTree {
    let d = dfa();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let root = random_belief(&d, &mut rng);
    let mut t = PolicyTree::new(root, d.clone());
    for _ in 0..insertions {
        let node = rng.gen_range(0..t.len());
        let k = rng.gen_range(1..=3);
        let probs = random_simplex(&mut rng, k);
        let children = probs
            .into_iter()
            .map(|prob| NewChild {
                prob,
                belief: random_belief(&d, &mut rng),
                observation: None,
            })
            .collect();
        t.add_arm(node, [0.0].into_iter().collect(), 1.0, 1.0, Outcome::FullDuration, children);
    }
    t
}

/// First node whose incremental `V` or `Q` differs in any bit from a full
/// recomputation.
pub fn first_mismatch(t: &PolicyTree) -> Option<String> {
    for (id, (v, qs)) in t.recompute_all().into_iter().enumerate() {
        let n = t.node(id);
        if n.value.to_bits() != v.to_bits() {
            return Some(format!("node {id}: V {} vs {v}", n.value));
        }
        for (a, q) in n.arms.iter().zip(qs) {
            if a.q.to_bits() != q.to_bits() {
                return Some(format!("node {id}: Q {} vs {q}", a.q));
            }
        }
    }
    None
}
