//! Bayes updates of a hybrid belief at the fire-detection sensing regions.

use sabpi::belief::HybridBelief;
use sabpi::scenarios;

fn main() -> anyhow::Result<()> {
    let s = scenarios::bundled("fire_detection")?;
    let b = HybridBelief::initial(&s);
    let fire = |b: &HybridBelief| -> Vec<String> { (0..3).map(|i| format!("{:.4}", b.marginal(i))).collect() };
    println!("prior P(fire) per site: {:?}", fire(&b));
    for name in ["above_1", "close_1"] {
        let r = s.observation_region_id(name).expect("bundled region");
        for o in b.observation_outcomes(&s, r)? {
            println!(
                "{name}: observe {:<6} with probability {:.4} -> P(fire) {:?}",
                s.observation_name(r, o.symbol),
                o.probability,
                fire(&o.belief)
            );
        }
    }
    // A second, coarser look at the same site after a close-range `fire`.
    let r = s.observation_region_id("close_1").unwrap();
    let first = b.observation_outcomes(&s, r)?.remove(1).belief;
    let again = s.observation_region_id("above_1").unwrap();
    for o in first.observation_outcomes(&s, again)? {
        println!("then above_1: {} ({:.4}) -> {:?}", s.observation_name(again, o.symbol), o.probability, fire(&o.belief));
    }
    Ok(())
}
