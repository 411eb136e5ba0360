//! SaBPI against kinodynamic RRT and MCTS with progressive widening on one
//! scenario, a few seeds each, with median/quartile anytime curves.
//!
//! cargo run --release --example baselines -- [scenario] [time_limit] [seeds]

use sabpi::eval::convergence_report;
use sabpi::planner::{Algorithm, PlannerConfig};
use sabpi::scenarios;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let name = args.next().unwrap_or_else(|| "crs".into());
    let time_limit = args.next().map_or(Ok(10.0), |a| a.parse())?;
    let seeds: Vec<u64> = (0..args.next().map_or(Ok(3), |a| a.parse())?).collect();
    let s = scenarios::resolve(&name)?;
    for algorithm in Algorithm::ALL {
        let cfg = PlannerConfig { algorithm, time_limit, ..Default::default() };
        let table = convergence_report(&s, &cfg, &seeds, 6);
        println!("{}: final V per seed {:?}, median {:.4}", algorithm.name(), table.final_values, table.median_final());
        print!("{}", table.to_csv());
    }
    Ok(())
}
