//! Bayes' rule evaluated directly on a fixture's own prior and sensor table.

use sabpi::belief::HybridBelief;
use sabpi::model::Scenario;

use super::fixtures::{sensing_scenario, PAIRS};

const TOL: f64 = 1e-9;

/// Bit of `PAIRS[i]` in the scenario's hypothesis encoding.
pub fn scenario_bit(s: &Scenario, i: usize) -> usize {
    let (region, prop) = PAIRS[i].split_once('.').unwrap();
    let r = s.region_id(region).unwrap();
    let p = s.ap.index_of(prop).unwrap();
    s.hypotheses.pair_index(r, p).unwrap()
}

/// Belief at a point inside the sensing ball but outside every region.
pub fn sensing_belief(s: &Scenario) -> HybridBelief {
    HybridBelief::initial(s).with_state([2.5, 5.0].into_iter().collect())
}

/// Normalization, total probability and agreement with the direct
/// computation, all to 1e-9.
pub fn check_fixture(s: &Scenario, joint: &[f64], table: &[Vec<f64>]) -> Result<(), String> {
    let b = sensing_belief(s);
    let site_props = table.len().trailing_zeros() as usize;
    let used = joint.len().trailing_zeros() as usize;
    let pair_of = |i: usize| if i < site_props { i } else { 2 };
    let local = |h: usize| h & ((1 << site_props) - 1);
    let outcomes = b.observation_outcomes(s, 0).map_err(|e| e.to_string())?;

    let total: f64 = outcomes.iter().map(|o| o.probability).sum();
    if (total - 1.0).abs() > TOL {
        return Err(format!("P(o) sums to {total}"));
    }
    for o in &outcomes {
        let mass: f64 = o.belief.entries().iter().map(|e| e.p).sum();
        if (mass - 1.0).abs() > TOL {
            return Err(format!("posterior after o = {} sums to {mass}", o.symbol));
        }
        let p_o: f64 = (0..joint.len()).map(|h| joint[h] * table[local(h)][o.symbol]).sum();
        if (o.probability - p_o).abs() > TOL {
            return Err(format!("P(o = {}) = {} but direct sum gives {p_o}", o.symbol, o.probability));
        }
        for i in 0..used {
            let expected = (0..joint.len())
                .filter(|h| h >> i & 1 == 1)
                .map(|h| joint[h] * table[local(h)][o.symbol])
                .sum::<f64>()
                / p_o;
            let got = o.belief.marginal(scenario_bit(s, pair_of(i)));
            if (got - expected).abs() > TOL {
                return Err(format!("{} after o = {}: {got} vs {expected}", PAIRS[pair_of(i)], o.symbol));
            }
        }
    }
    // Mixing the posteriors by P(o) recovers the prior after the jump.
    for entry in b.region_jump(s).entries() {
        let mixed: f64 = outcomes
            .iter()
            .map(|o| {
                let p: f64 = o.belief.entries().iter().filter(|x| x.q == entry.q && x.e == entry.e).map(|x| x.p).sum();
                o.probability * p
            })
            .sum();
        if (mixed - entry.p).abs() > TOL {
            return Err(format!("marginalization: {mixed} vs {}", entry.p));
        }
    }
    Ok(())
}

/// Posterior of `site.p0` after a positive reading, for a symmetric sensor.
pub fn positive_posterior(prior: f64, accuracy: f64) -> f64 {
    let sensor = vec![vec![accuracy, 1.0 - accuracy], vec![1.0 - accuracy, accuracy]];
    let s = sensing_scenario(1, false, &[1.0 - prior, prior], &sensor);
    let outs = sensing_belief(&s).observation_outcomes(&s, 0).unwrap();
    let hit = outs.iter().find(|o| o.symbol == 1).unwrap();
    hit.belief.marginal(scenario_bit(&s, 0))
}
