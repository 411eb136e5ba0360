//! Exact optimal values of the grid micro-instances next to what SaBPI
//! reaches on their continuous twins.
//!
//! cargo run --release --example oracle -- [time_limit]

use sabpi::eval::oracle::suite;
use sabpi::eval::oracle_optimal_value;
use sabpi::planner::{plan_with_observer, PlannerConfig};

fn main() -> anyhow::Result<()> {
    let time_limit = std::env::args().nth(1).map_or(Ok(10.0), |a| a.parse())?;
    for inst in suite() {
        let optimum = oracle_optimal_value(&inst)?;
        let s = inst.twin()?;
        let cfg = PlannerConfig { time_limit, success_threshold: optimum - 1e-9, ..Default::default() };
        let mut peak: f64 = 0.0;
        let out = plan_with_observer(&s, &cfg, |tree, _| peak = peak.max(tree.root().value));
        println!(
            "{:14} optimum {:.4}  planner {:.4} (peak {:.4}) in {:.2} s",
            inst.name, optimum, out.report.value, peak, out.report.wall_time
        );
    }
    Ok(())
}
