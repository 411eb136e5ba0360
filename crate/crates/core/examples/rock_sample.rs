//! Continuous rock sampling under two priors: a confident prior leads
//! straight to the best rock, an ambiguous one to a policy that senses
//! several rocks before committing.
//!
//! cargo run --release --example rock_sample -- [time_limit]

use sabpi::model::Scenario;
use sabpi::planner::{plan, PlannerConfig};
use sabpi::scenarios;

fn describe(label: &str, s: &Scenario, time_limit: f64) {
    let out = plan(s, &PlannerConfig { time_limit, ..Default::default() });
    let name = |r: usize| s.regions[r].name.clone();
    println!("{label}: V = {:.4}", out.report.value);
    println!("  first committed rock: {:?}", out.policy.first_committed_region().map(name));
    println!("  rocks observed: {:?}", out.policy.observed_targets(s).into_iter().map(name).collect::<Vec<_>>());
}

fn main() -> anyhow::Result<()> {
    let time_limit = std::env::args().nth(1).map_or(Ok(20.0), |a| a.parse())?;
    describe("prior [0.2, 0.4, 0.9]", &scenarios::crs_with_prior([0.2, 0.4, 0.9])?, time_limit);
    describe("prior [0.5, 0.6, 0.7]", &scenarios::bundled("crs")?, time_limit);
    Ok(())
}
