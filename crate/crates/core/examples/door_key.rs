//! Plans the door-key task to a probability-one policy and checks it by
//! simulation.
//!
//! cargo run --release --example door_key -- [time_limit] [seed]

use sabpi::eval::execute_policy;
use sabpi::planner::{plan, PlannerConfig};
use sabpi::scenarios;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let time_limit = args.next().map_or(Ok(60.0), |a| a.parse())?;
    let seed = args.next().map_or(Ok(0), |a| a.parse())?;
    let s = scenarios::bundled("door_key")?;
    let out = plan(&s, &PlannerConfig { time_limit, seed, ..Default::default() });
    let r = &out.report;
    println!("V = {:.4} after {:.2} s, {} nodes ({:?})", r.value, r.wall_time, r.nodes, r.termination);
    for a in &r.anytime {
        println!("  t = {:7.3} s  iteration {:5}  V = {:.4}", a.time, a.iteration, a.value);
    }
    println!("policy has {} nodes and observes {:?}", out.policy.nodes.len(), out.policy.sensed_regions());
    let ex = execute_policy(&s, &out.policy, 2000, seed, None)?;
    println!("executed: {:.4} [{:.4}, {:.4}]", ex.rate, ex.ci_low, ex.ci_high);
    Ok(())
}
