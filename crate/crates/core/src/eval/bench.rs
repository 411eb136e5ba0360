//! Batch planning runs and their anytime curves.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ScenarioError;
use crate::model::Scenario;
use crate::planner::{plan, Algorithm, AnytimeSample, PlannerConfig};

/// Root value at time `t` given an improving sample list.
fn value_at(samples: &[AnytimeSample], t: f64) -> f64 {
    samples
        .iter()
        .take_while(|s| s.time <= t)
        .last()
        .map_or(samples.first().map_or(0.0, |s| s.value), |s| s.value)
}

/// Linear-interpolated quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTable {
    pub scenario: String,
    pub algorithm: Algorithm,
    pub times: Vec<f64>,
    /// One anytime curve per seed.
    pub curves: Vec<Vec<AnytimeSample>>,
    pub final_values: Vec<f64>,
    /// Per grid time: (q25, median, q75).
    pub quartiles: Vec<(f64, f64, f64)>,
}

impl ConvergenceTable {
    pub fn median_final(&self) -> f64 {
        let mut v = self.final_values.clone();
        v.sort_by(f64::total_cmp);
        quantile(&v, 0.5)
    }

    /// `time,q25,median,q75` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("time,q25,median,q75\n");
        for (t, (a, b, c)) in self.times.iter().zip(&self.quartiles) {
            out.push_str(&format!("{t},{a},{b},{c}\n"));
        }
        out
    }
}

/// Runs `cfg` once per seed and aggregates the anytime curves on `points`
/// evenly spaced times over the budget.
pub fn convergence_report(s: &Scenario, cfg: &PlannerConfig, seeds: &[u64], points: usize) -> ConvergenceTable {
    let mut curves = Vec::new();
    let mut finals = Vec::new();
    for &seed in seeds {
        let run = PlannerConfig { seed, ..cfg.clone() };
        let out = plan(s, &run);
        finals.push(out.report.value);
        curves.push(out.report.anytime);
    }
    aggregate(s.name.clone(), cfg, curves, finals, points)
}

pub(crate) fn aggregate(
    scenario: String,
    cfg: &PlannerConfig,
    curves: Vec<Vec<AnytimeSample>>,
    final_values: Vec<f64>,
    points: usize,
) -> ConvergenceTable {
    let times: Vec<f64> = if cfg.time_limit <= 0.0 || points < 2 {
        vec![0.0]
    } else {
        (0..points).map(|i| cfg.time_limit * i as f64 / (points - 1) as f64).collect()
    };
    let quartiles = times
        .iter()
        .map(|&t| {
            let mut v: Vec<f64> = curves.iter().map(|c| value_at(c, t)).collect();
            v.sort_by(f64::total_cmp);
            (quantile(&v, 0.25), quantile(&v, 0.5), quantile(&v, 0.75))
        })
        .collect();
    ConvergenceTable {
        scenario,
        algorithm: cfg.algorithm,
        times,
        curves,
        final_values,
        quartiles,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkRow {
    pub scenario: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub value: f64,
    pub iterations: u64,
    pub nodes: usize,
    pub wall_time: f64,
}

impl BenchmarkRow {
    pub const CSV_HEADER: &'static str = "scenario,algorithm,seed,value,iterations,nodes,wall_time";

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.scenario,
            self.algorithm.name(),
            self.seed,
            self.value,
            self.iterations,
            self.nodes,
            self.wall_time
        )
    }
}

/// Every scenario file in `suite` (sorted by name) × every algorithm ×
/// seeds `0..seeds`. `progress` sees each row as it completes.
pub fn benchmark(
    suite: &Path,
    seeds: u64,
    base: &PlannerConfig,
    mut progress: impl FnMut(&BenchmarkRow),
) -> Result<Vec<BenchmarkRow>, ScenarioError> {
    let mut files: Vec<_> = std::fs::read_dir(suite)
        .map_err(|e| ScenarioError::Invalid(format!("{}: {e}", suite.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut rows = Vec::new();
    for f in files {
        let s = Scenario::load(&f)?;
        for algorithm in Algorithm::ALL {
            for seed in 0..seeds {
                let cfg = PlannerConfig {
                    algorithm,
                    seed,
                    ..base.clone()
                };
                let r = plan(&s, &cfg).report;
                let row = BenchmarkRow {
                    scenario: s.name.clone(),
                    algorithm,
                    seed,
                    value: r.value,
                    iterations: r.iterations,
                    nodes: r.nodes,
                    wall_time: r.wall_time,
                };
                progress(&row);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        let v = [0.0, 1.0, 2.0, 3.0];
        assert_eq!(quantile(&v, 0.5), 1.5);
        assert_eq!(quantile(&v, 0.25), 0.75);
        assert_eq!(quantile(&v, 1.0), 3.0);
    }

    #[test]
    fn zero_budget_curves_hold_only_the_initial_point() {
        let s = crate::scenarios::bundled("door_key").unwrap();
        let cfg = PlannerConfig {
            time_limit: 0.0,
            ..Default::default()
        };
        let t = convergence_report(&s, &cfg, &[0, 1, 2], 10);
        assert_eq!(t.curves.len(), 3);
        assert_eq!(t.times, vec![0.0]);
        for c in &t.curves {
            assert_eq!(c.len(), 1);
            assert_eq!(c[0].value, 0.0);
        }
        assert_eq!(t.median_final(), 0.0);
    }
}
