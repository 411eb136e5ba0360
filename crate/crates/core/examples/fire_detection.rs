//! Quadcopter fire detection: plan, save the policy, replay it and write
//! a few execution traces.
//!
//! cargo run --release --example fire_detection -- [time_limit] [out_dir]

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use sabpi::eval::execute_policy;
use sabpi::planner::{plan, PlannerConfig};
use sabpi::scenarios;

fn main() -> anyhow::Result<()> {
    let mut args = std::env::args().skip(1);
    let time_limit = args.next().map_or(Ok(30.0), |a| a.parse())?;
    let dir = PathBuf::from(args.next().unwrap_or_else(|| std::env::temp_dir().display().to_string()));
    let s = scenarios::bundled("fire_detection")?;
    let out = plan(&s, &PlannerConfig { time_limit, ..Default::default() });
    println!("V = {:.4}, {} tree nodes, policy of {} nodes", out.report.value, out.report.nodes, out.policy.nodes.len());
    let policy_path = dir.join("fire_policy.json");
    out.policy.save(&policy_path)?;
    let mut traces = BufWriter::new(File::create(dir.join("fire_traces.jsonl"))?);
    execute_policy(&s, &out.policy, 20, 1, Some(&mut traces))?;
    let ex = execute_policy(&s, &out.policy, 10_000, 2, None)?;
    println!(
        "10k executions: {:.4} [{:.4}, {:.4}], {} violated, {} ran out of policy",
        ex.rate, ex.ci_low, ex.ci_high, ex.violated, ex.exhausted
    );
    println!("policy and traces written to {}", dir.display());
    Ok(())
}
