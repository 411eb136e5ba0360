//! Hybrid beliefs: a distribution over (DFA state, environment hypothesis)
//! paired with the deterministic memory vector and continuous state.
//!
//! Accepting DFA states are treated as absorbing here: once a pair's finite
//! trace is accepted the task is complete for that pair, so later jumps leave
//! its mass where it is.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::BeliefError;
use crate::ltlf::{Dfa, StateId};
use crate::model::{EnvHypothesis, MemoryVector, Scenario, StateVec};

/// Probabilities at or below this are dropped.
pub const PRUNE_THRESHOLD: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefEntry {
    pub q: u32,
    pub e: EnvHypothesis,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridBelief {
    pub x: StateVec,
    pub memory: MemoryVector,
    dist: Arc<[BeliefEntry]>,
}

/// One branch of an observation event.
#[derive(Clone, Debug, PartialEq)]
pub struct ObservationOutcome {
    pub symbol: usize,
    pub probability: f64,
    pub belief: HybridBelief,
}

impl HybridBelief {
    /// Merges duplicate pairs, prunes near-zero mass, renormalizes, and sorts
    /// by `(q, e)` so equal distributions compare equal.
    pub fn new(x: StateVec, memory: MemoryVector, entries: impl IntoIterator<Item = BeliefEntry>) -> Self {
        let mut v: Vec<BeliefEntry> = entries.into_iter().collect();
        v.sort_by_key(|b| (b.q, b.e));
        let mut merged: Vec<BeliefEntry> = Vec::with_capacity(v.len());
        for b in v {
            match merged.last_mut() {
                Some(last) if last.q == b.q && last.e == b.e => last.p += b.p,
                _ => merged.push(b),
            }
        }
        let total: f64 = merged.iter().map(|b| b.p).sum();
        assert!(total > 0.0 && total.is_finite(), "belief has no mass");
        for b in &mut merged {
            b.p /= total;
        }
        merged.retain(|b| b.p > PRUNE_THRESHOLD);
        let total: f64 = merged.iter().map(|b| b.p).sum();
        for b in &mut merged {
            b.p /= total;
        }
        HybridBelief {
            x,
            memory,
            dist: merged.into(),
        }
    }

    /// The root belief: prior over hypotheses, with the DFA having consumed
    /// the label of the initial state under each hypothesis.
    pub fn initial(s: &Scenario) -> Self {
        let q0 = s.dfa.initial();
        Self::new(
            s.x0.clone(),
            s.m0,
            s.hypotheses.prior().iter().map(|&(e, p)| BeliefEntry {
                q: s.dfa.step(q0, s.label_at(&s.x0, e)) as u32,
                e,
                p,
            }),
        )
    }

    pub fn entries(&self) -> &[BeliefEntry] {
        &self.dist
    }

    /// Same discrete belief at a new continuous state (flow without a guard).
    pub fn with_state(&self, x: StateVec) -> Self {
        HybridBelief {
            x,
            memory: self.memory,
            dist: Arc::clone(&self.dist),
        }
    }

    pub fn acc_mass(&self, dfa: &Dfa) -> f64 {
        self.dist.iter().filter(|b| dfa.is_accepting(b.q as StateId)).map(|b| b.p).sum()
    }

    pub fn trap_mass(&self, dfa: &Dfa) -> f64 {
        self.dist.iter().filter(|b| dfa.is_trap(b.q as StateId)).map(|b| b.p).sum()
    }

    /// Every pair sits in a trap state.
    pub fn is_doomed(&self, dfa: &Dfa) -> bool {
        self.dist.iter().all(|b| dfa.is_trap(b.q as StateId))
    }

    /// No pair can change its verdict any more.
    pub fn is_settled(&self, dfa: &Dfa) -> bool {
        self.dist
            .iter()
            .all(|b| dfa.is_trap(b.q as StateId) || dfa.is_accepting(b.q as StateId))
    }

    /// `P(pair bit = true)`.
    pub fn marginal(&self, bit: usize) -> f64 {
        self.dist.iter().filter(|b| b.e.get(bit)).map(|b| b.p).sum()
    }

    /// Marginal over hypotheses, sorted by hypothesis.
    pub fn hypothesis_marginal(&self) -> Vec<(EnvHypothesis, f64)> {
        let mut out: Vec<(EnvHypothesis, f64)> = Vec::new();
        for b in self.dist.iter() {
            match out.iter_mut().find(|(e, _)| *e == b.e) {
                Some((_, p)) => *p += b.p,
                None => out.push((b.e, b.p)),
            }
        }
        out.sort_by_key(|(e, _)| *e);
        out
    }

    /// Marginal over DFA states.
    pub fn state_marginal(&self) -> Vec<(u32, f64)> {
        let mut out: Vec<(u32, f64)> = Vec::new();
        for b in self.dist.iter() {
            match out.last_mut() {
                Some((q, p)) if *q == b.q => *p += b.p,
                _ => out.push((b.q, b.p)),
            }
        }
        out
    }

    /// `G_R` jump: every pair takes the DFA transition on the label at `x`
    /// under its own hypothesis. Continuous state and memory are unchanged.
    pub fn region_jump(&self, s: &Scenario) -> Self {
        let dfa = &s.dfa;
        let entries: Vec<BeliefEntry> = self
            .dist
            .iter()
            .map(|b| BeliefEntry {
                q: advance(dfa, b.q, s.label_at(&self.x, b.e)),
                ..*b
            })
            .collect();
        Self::new(self.x.clone(), self.memory, entries)
    }

    /// `G_T` jump at first entry to `region`: DFA step on the label at `x`,
    /// then a Bayes update for each observation symbol with nonzero
    /// probability. Memory gains the region's bit.
    pub fn observation_outcomes(&self, s: &Scenario, region: usize) -> Result<Vec<ObservationOutcome>, BeliefError> {
        let r = s.observation_regions.get(region).ok_or(BeliefError::UnknownRegion(region))?;
        if self.memory.is_visited(region) {
            return Err(BeliefError::AlreadyVisited(region));
        }
        let jumped: Vec<BeliefEntry> = self
            .dist
            .iter()
            .map(|b| BeliefEntry {
                q: advance(&s.dfa, b.q, s.label_at(&self.x, b.e)),
                ..*b
            })
            .collect();
        let memory = self.memory.update(region);
        let mut out = Vec::with_capacity(r.num_symbols());
        for o in 0..r.num_symbols() {
            let mut weighted = Vec::with_capacity(jumped.len());
            let mut total = 0.0;
            for b in &jumped {
                let w = s.obs_likelihood(region, b.e, self.memory, o)? * b.p;
                if w > 0.0 {
                    total += w;
                    weighted.push(BeliefEntry { p: w, ..*b });
                }
            }
            if total > PRUNE_THRESHOLD {
                out.push(ObservationOutcome {
                    symbol: o,
                    probability: total,
                    belief: Self::new(self.x.clone(), memory, weighted),
                });
            }
        }
        // Pruned symbols lose at most 1e-12 each; restore exact normalization.
        let z: f64 = out.iter().map(|o| o.probability).sum();
        for o in &mut out {
            o.probability /= z;
        }
        Ok(out)
    }

    pub fn to_document(&self) -> BeliefDocument {
        BeliefDocument {
            x: self.x.to_vec(),
            memory: self.memory.0,
            dist: self.dist.iter().map(|b| ((b.q, b.e.0), b.p)).collect(),
        }
    }

    pub fn from_document(doc: &BeliefDocument) -> Self {
        HybridBelief {
            x: doc.x.iter().copied().collect(),
            memory: MemoryVector(doc.memory),
            dist: doc
                .dist
                .iter()
                .map(|&((q, e), p)| BeliefEntry {
                    q,
                    e: EnvHypothesis(e),
                    p,
                })
                .collect(),
        }
    }
}

#[inline]
fn advance(dfa: &Dfa, q: u32, label: crate::ltlf::Symbol) -> u32 {
    if dfa.is_accepting(q as StateId) {
        q
    } else {
        dfa.step(q as StateId, label) as u32
    }
}

/// Serialized belief: `((q, hypothesis bits), mass)` pairs, the continuous
/// state and the memory bits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BeliefDocument {
    pub x: Vec<f64>,
    pub memory: u64,
    pub dist: Vec<((u32, u32), f64)>,
}
