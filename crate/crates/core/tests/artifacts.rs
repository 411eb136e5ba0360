use sabpi::artifact::PolicyArtifact;
use sabpi::eval::{benchmark, BenchmarkRow};
use sabpi::eval::oracle::suite;
use sabpi::planner::{plan, Algorithm, PlannerConfig};
use sabpi::scenarios;

#[test]
fn policy_round_trips_through_json() {
    let s = scenarios::bundled("crs").unwrap();
    let out = plan(&s, &PlannerConfig { time_limit: 0.5, ..Default::default() });
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("policy.json");
    out.policy.save(&path).unwrap();
    let back = PolicyArtifact::load(&path).unwrap();
    assert_eq!(back, out.policy);
    assert_eq!(back.analytic_value(), out.policy.analytic_value());
}

#[test]
fn benchmark_covers_every_file_algorithm_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["reach", "blind_commit"] {
        let inst = suite().into_iter().find(|i| i.name == name).unwrap();
        std::fs::write(dir.path().join(format!("{name}.json")), inst.twin_json().to_string()).unwrap();
    }
    std::fs::write(dir.path().join("notes.txt"), "not a scenario").unwrap();
    let base = PlannerConfig { time_limit: 0.2, ..Default::default() };
    let mut rows: Vec<BenchmarkRow> = Vec::new();
    let returned = benchmark(dir.path(), 2, &base, |r| rows.push(r.clone())).unwrap();
    assert_eq!(rows.len(), 2 * Algorithm::ALL.len() * 2);
    assert_eq!(returned, rows);
    assert!(rows.iter().all(|r| (0.0..=1.0).contains(&r.value)));
    let line = rows[0].to_csv();
    assert_eq!(line.split(',').count(), BenchmarkRow::CSV_HEADER.split(',').count());
}
