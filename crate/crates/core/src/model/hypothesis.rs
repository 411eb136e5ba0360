//! Hidden environment hypotheses and the persistent-observation memory.

use serde::{Deserialize, Serialize};

/// Default cap on the joint hypothesis space: `2^12` assignments.
pub const DEFAULT_MAX_UNCERTAIN_PAIRS: usize = 12;

/// A joint truth assignment over every uncertain (region, proposition) pair.
/// Bit `k` is the value of pair `k` in [`HypothesisSpace::pairs`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EnvHypothesis(pub u32);

impl EnvHypothesis {
    #[inline]
    pub fn get(self, bit: usize) -> bool {
        self.0 >> bit & 1 == 1
    }

    #[inline]
    pub fn with(self, bit: usize, value: bool) -> Self {
        if value {
            EnvHypothesis(self.0 | 1 << bit)
        } else {
            EnvHypothesis(self.0 & !(1 << bit))
        }
    }

    /// Packs the listed bits into a small index, first bit lowest.
    pub fn project(self, bits: &[usize]) -> usize {
        bits.iter()
            .enumerate()
            .fold(0, |acc, (j, &b)| acc | (usize::from(self.get(b)) << j))
    }
}

/// Visited flags for observation regions; bit `k` is region `k`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MemoryVector(pub u64);

impl MemoryVector {
    pub const EMPTY: MemoryVector = MemoryVector(0);

    #[inline]
    pub fn is_visited(self, region: usize) -> bool {
        self.0 >> region & 1 == 1
    }

    /// Marks `region` as visited. Idempotent.
    #[inline]
    pub fn update(self, region: usize) -> Self {
        MemoryVector(self.0 | 1 << region)
    }

    /// Bitstring with region 0 first, e.g. `010` for region 1 of three.
    pub fn to_bitstring(self, len: usize) -> String {
        (0..len).map(|k| if self.is_visited(k) { '1' } else { '0' }).collect()
    }

    pub fn from_bitstring(s: &str) -> Option<Self> {
        if s.len() > 64 {
            return None;
        }
        s.chars().enumerate().try_fold(MemoryVector::EMPTY, |m, (k, c)| match c {
            '0' => Some(m),
            '1' => Some(m.update(k)),
            _ => None,
        })
    }
}

/// An uncertain proposition attached to a region.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct UncertainPair {
    pub region: usize,
    pub prop: usize,
}

/// The joint hypothesis space with its prior. Zero-probability hypotheses are
/// not stored.
#[derive(Clone, Debug, PartialEq)]
pub struct HypothesisSpace {
    pairs: Vec<UncertainPair>,
    prior: Vec<(EnvHypothesis, f64)>,
}

impl HypothesisSpace {
    /// Builds from an explicit joint table. Entries must be non-negative and
    /// sum to 1 within 1e-9.
    pub fn from_joint(pairs: Vec<UncertainPair>, joint: Vec<(EnvHypothesis, f64)>) -> Result<Self, String> {
        let limit = 1u64 << pairs.len();
        let mut prior: Vec<(EnvHypothesis, f64)> = Vec::new();
        for (e, p) in joint {
            if u64::from(e.0) >= limit {
                return Err(format!("hypothesis {} has bits beyond the {} uncertain pairs", e.0, pairs.len()));
            }
            if !(p.is_finite() && p >= 0.0) {
                return Err(format!("prior probability {p} is not a valid probability"));
            }
            if p == 0.0 {
                continue;
            }
            match prior.iter_mut().find(|(h, _)| *h == e) {
                Some(_) => return Err(format!("hypothesis {} listed twice", e.0)),
                None => prior.push((e, p)),
            }
        }
        let total: f64 = prior.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(format!("prior sums to {total}, expected 1"));
        }
        prior.sort_by_key(|(e, _)| *e);
        Ok(HypothesisSpace { pairs, prior })
    }

    /// Product distribution from per-pair marginals `P(pair = true)`.
    pub fn from_independent(pairs: Vec<UncertainPair>, marginals: &[f64]) -> Result<Self, String> {
        if marginals.len() != pairs.len() {
            return Err("one marginal per uncertain pair is required".into());
        }
        if let Some(p) = marginals.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(format!("marginal {p} is outside [0, 1]"));
        }
        let joint = (0..1u32 << pairs.len())
            .map(|bits| {
                let e = EnvHypothesis(bits);
                let p = marginals
                    .iter()
                    .enumerate()
                    .map(|(k, m)| if e.get(k) { *m } else { 1.0 - m })
                    .product::<f64>();
                (e, p)
            })
            .collect();
        Self::from_joint(pairs, joint)
    }

    /// A single certain hypothesis (no uncertainty).
    pub fn deterministic() -> Self {
        HypothesisSpace {
            pairs: Vec::new(),
            prior: vec![(EnvHypothesis(0), 1.0)],
        }
    }

    pub fn pairs(&self) -> &[UncertainPair] {
        &self.pairs
    }

    pub fn prior(&self) -> &[(EnvHypothesis, f64)] {
        &self.prior
    }

    pub fn pair_index(&self, region: usize, prop: usize) -> Option<usize> {
        self.pairs.iter().position(|p| p.region == region && p.prop == prop)
    }

    /// Marginal probability that pair `bit` is true under a weighted table.
    pub fn marginal<'a>(bit: usize, table: impl IntoIterator<Item = (&'a EnvHypothesis, f64)>) -> f64 {
        table.into_iter().filter(|(e, _)| e.get(bit)).map(|(_, p)| p).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memory_update_examples() {
        let m = MemoryVector::from_bitstring("000").unwrap();
        assert_eq!(m.update(1).to_bitstring(3), "010");
        assert_eq!(m.update(1).update(1).to_bitstring(3), "010");
        assert_eq!(m.update(1).update(2).to_bitstring(3), "011");
    }

    #[test]
    fn independent_prior_expands_to_product() {
        let pairs = vec![UncertainPair { region: 0, prop: 0 }, UncertainPair { region: 1, prop: 0 }];
        let h = HypothesisSpace::from_independent(pairs, &[0.2, 0.9]).unwrap();
        let p = |bits| h.prior().iter().find(|(e, _)| e.0 == bits).map_or(0.0, |(_, p)| *p);
        assert!((p(0b00) - 0.08).abs() < 1e-12);
        assert!((p(0b01) - 0.02).abs() < 1e-12);
        assert!((p(0b10) - 0.72).abs() < 1e-12);
        assert!((p(0b11) - 0.18).abs() < 1e-12);
    }

    #[test]
    fn certain_marginals_drop_zero_hypotheses() {
        let pairs = vec![UncertainPair { region: 0, prop: 0 }];
        let h = HypothesisSpace::from_independent(pairs, &[1.0]).unwrap();
        assert_eq!(h.prior(), &[(EnvHypothesis(1), 1.0)]);
    }

    #[test]
    fn joint_prior_must_normalize() {
        let pairs = vec![UncertainPair { region: 0, prop: 0 }];
        assert!(HypothesisSpace::from_joint(pairs.clone(), vec![(EnvHypothesis(0), 0.5)]).is_err());
        assert!(HypothesisSpace::from_joint(pairs, vec![(EnvHypothesis(2), 1.0)]).is_err());
    }

    #[test]
    fn projection_packs_bits() {
        let e = EnvHypothesis(0b1010);
        assert_eq!(e.project(&[1, 3]), 0b11);
        assert_eq!(e.project(&[0, 1]), 0b10);
    }
}
