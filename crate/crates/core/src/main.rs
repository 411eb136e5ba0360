use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};

use sabpi::artifact::PolicyArtifact;
use sabpi::eval::{benchmark, execute_policy, BenchmarkRow};
use sabpi::ltlf::{compile_dfa, parse_ltlf, PropositionSet};
use sabpi::planner::{plan, Algorithm, PlannerConfig, Selection};
use sabpi::scenarios;

#[derive(Parser)]
#[command(name = "sabpi", version, about = "Observation-feedback policy synthesis for LTLf tasks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Translate an LTLf formula to a minimal DFA.
    CompileDfa {
        #[arg(long)]
        formula: String,
        /// Atomic propositions, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        ap: Vec<String>,
        #[arg(long)]
        out: PathBuf,
        /// Also write Graphviz output next to `out`.
        #[arg(long)]
        dot: bool,
    },
    /// Plan a policy for a scenario file or bundled scenario name.
    Plan {
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value = "sabpi")]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 1000)]
        k: usize,
        #[arg(long, default_value_t = 0.05)]
        c: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1.0)]
        success_threshold: f64,
        /// Stop after this many iterations (timing-independent runs).
        #[arg(long)]
        max_iterations: Option<u64>,
        /// How expansion nodes are drawn from the selected subtree.
        #[arg(long, default_value = "hybrid-voronoi")]
        selection: Selection,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Monte-Carlo execution of a stored policy.
    Evaluate {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write one JSON trace per line.
        #[arg(long)]
        traces: Option<PathBuf>,
    },
    /// Every algorithm on every scenario in a directory, over several seeds.
    Benchmark {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, default_value_t = 100)]
        seeds: u64,
        #[arg(long, default_value_t = 60.0)]
        time_limit: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::CompileDfa { formula, ap, out, dot } => {
            let ap = PropositionSet::new(ap).map_err(anyhow::Error::msg)?;
            let f = parse_ltlf(&formula, &ap)?;
            let dfa = compile_dfa(&f, &ap)?;
            std::fs::write(&out, serde_json::to_string_pretty(&dfa.to_document())?)
                .with_context(|| format!("writing {}", out.display()))?;
            if dot {
                std::fs::write(out.with_extension("dot"), dfa.to_dot())?;
            }
            println!(
                "{} states, {} accepting, {} trap",
                dfa.num_states(),
                dfa.accepting_states().len(),
                dfa.trap_states().len()
            );
        }
        Command::Plan {
            scenario,
            algorithm,
            time_limit,
            k,
            c,
            seed,
            success_threshold,
            max_iterations,
            selection,
            out,
            report,
        } => {
            let s = scenarios::resolve(&scenario)?;
            let cfg = PlannerConfig {
                algorithm,
                k,
                c,
                time_limit,
                seed,
                success_threshold,
                max_iterations,
                selection,
                ..Default::default()
            };
            if let Err(msg) = cfg.validate() {
                bail!("{msg}");
            }
            let result = plan(&s, &cfg);
            result.policy.save(&out).with_context(|| format!("writing {}", out.display()))?;
            if let Some(path) = report {
                std::fs::write(&path, serde_json::to_string_pretty(&result.report)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            let r = &result.report;
            println!(
                "{} on {}: V = {:.4} after {} iterations, {} nodes, {:.2} s ({:?})",
                algorithm.name(),
                s.name,
                r.value,
                r.iterations,
                r.nodes,
                r.wall_time,
                r.termination
            );
        }
        Command::Evaluate {
            scenario,
            policy,
            trials,
            seed,
            traces,
        } => {
            let s = scenarios::resolve(&scenario)?;
            let p = PolicyArtifact::load(&policy).with_context(|| format!("reading {}", policy.display()))?;
            let mut sink = match traces {
                Some(path) => Some(BufWriter::new(File::create(path)?)),
                None => None,
            };
            let summary = execute_policy(&s, &p, trials, seed, sink.as_mut().map(|w| w as &mut dyn Write))?;
            if let Some(mut w) = sink {
                w.flush()?;
            }
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Benchmark {
            suite,
            seeds,
            time_limit,
            out,
        } => {
            let mut csv = BufWriter::new(File::create(&out).with_context(|| format!("creating {}", out.display()))?);
            writeln!(csv, "{}", BenchmarkRow::CSV_HEADER)?;
            let base = PlannerConfig {
                time_limit,
                ..Default::default()
            };
            let mut write_err = None;
            benchmark(&suite, seeds, &base, |row| {
                eprintln!("{} {} seed {}: V = {:.4}", row.scenario, row.algorithm.name(), row.seed, row.value);
                if let Err(e) = writeln!(csv, "{}", row.to_csv()).and_then(|_| csv.flush()) {
                    write_err.get_or_insert(e);
                }
            })?;
            if let Some(e) = write_err {
                return Err(e.into());
            }
        }
    }
    Ok(())
}
