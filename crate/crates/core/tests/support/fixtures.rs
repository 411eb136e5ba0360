//! Small scenarios built in code for property tests.

use rand::Rng;
use sabpi::model::Scenario;
use serde_json::json;

/// Names of the uncertain pairs in bit order of the `joint` argument below.
pub const PAIRS: [&str; 3] = ["site.p0", "site.p1", "other.p0"];

/// A 10 x 10 single-integrator world with a `site` region carrying
/// `site_props` (1 or 2) uncertain propositions, optionally an `other`
/// region with one more, and a sensing ball `look` over `site` at (5, 5)
/// with radius 3. `joint[h]` is the prior of hypothesis `h` whose bit `i`
/// says whether `PAIRS[i]` holds (only the used pairs). `table[h][o]` is the
/// sensor model over the site's local hypotheses.
pub fn sensing_scenario(site_props: usize, other: bool, joint: &[f64], table: &[Vec<f64>]) -> Scenario {
    let used: Vec<&str> = PAIRS[..site_props].iter().copied().chain(other.then_some(PAIRS[2])).collect();
    let joint_entries: Vec<_> = joint
        .iter()
        .enumerate()
        .map(|(h, p)| {
            let truths: Vec<&str> = used.iter().enumerate().filter(|(i, _)| h >> i & 1 == 1).map(|(_, n)| *n).collect();
            json!({ "true": truths, "probability": p })
        })
        .collect();
    let uncertain = &["p0", "p1"][..site_props];
    let mut regions = vec![json!({
        "name": "site",
        "shape": { "type": "box", "lower": [4.0, 4.0], "upper": [6.0, 6.0] },
        "labels": ["site"],
        "uncertain": uncertain,
    })];
    if other {
        regions.push(json!({
            "name": "other",
            "shape": { "type": "box", "lower": [7.0, 1.0], "upper": [9.0, 3.0] },
            "uncertain": ["p0"],
        }));
    }
    let doc = json!({
        "name": "sensing_fixture",
        "workspace": {
            "state_space": { "lower": [0.0, 0.0], "upper": [10.0, 10.0] },
            "control_space": { "lower": [-1.0, -1.0], "upper": [1.0, 1.0] },
        },
        "dynamics": { "model": "single_integrator", "dim": 2 },
        "regions": regions,
        "observation_regions": [{
            "name": "look",
            "shape": { "type": "ball", "center": [5.0, 5.0], "radius": 3.0 },
            "target": "site",
            "table": table,
        }],
        "prior": { "joint": joint_entries },
        "task": { "propositions": ["site", "p0", "p1"], "formula": "F(site & p0) & G(p1 -> F(site))" },
        "initial": { "state": [1.0, 1.0] },
    });
    Scenario::from_json(&doc.to_string()).expect("fixture scenario is valid")
}

/// A random probability vector of length `n` with entries bounded away from 0.
pub fn random_simplex(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
    let z: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / z).collect()
}

/// A random sensing fixture; returns the scenario, its joint prior and table.
pub fn random_sensing(rng: &mut impl Rng) -> (Scenario, Vec<f64>, Vec<Vec<f64>>) {
    let site_props = rng.gen_range(1..=2);
    let other = rng.gen_bool(0.5);
    let bits = site_props + usize::from(other);
    let joint = random_simplex(rng, 1 << bits);
    let n = 1 << site_props;
    let table: Vec<Vec<f64>> = (0..n).map(|_| random_simplex(rng, n)).collect();
    (sensing_scenario(site_props, other, &joint, &table), joint, table)
}

/// Harmonic oscillator `x' = y, y' = -x + u` on `[-5, 5]^2` with the given
/// `A`-labeled regions and obstacles (JSON shapes).
pub fn oscillator_scenario(regions: Vec<serde_json::Value>, obstacles: Vec<serde_json::Value>) -> Scenario {
    let regions: Vec<_> = regions
        .into_iter()
        .enumerate()
        .map(|(i, shape)| json!({ "name": format!("r{i}"), "shape": shape, "labels": ["A"] }))
        .collect();
    let doc = json!({
        "name": "oscillator",
        "workspace": {
            "state_space": { "lower": [-5.0, -5.0], "upper": [5.0, 5.0] },
            "control_space": { "lower": [-1.0], "upper": [1.0] },
            "obstacles": obstacles,
        },
        "dynamics": { "model": "linear", "a": [[0.0, 1.0], [-1.0, 0.0]], "b": [[0.0], [1.0]], "position_dims": [0, 1] },
        "regions": regions,
        "task": { "propositions": ["A"], "formula": "F(A)" },
        "initial": { "state": [1.0, 0.0] },
    });
    Scenario::from_json(&doc.to_string()).expect("oscillator scenario is valid")
}

/// Quadcopter with drag in a 20 m box with one `A` box whose lower x face
/// sits at `wall_x`.
pub fn quadcopter_scenario(drag: f64, wall_x: f64) -> Scenario {
    let doc = json!({
        "name": "quad",
        "workspace": {
            "state_space": { "lower": [0.0, 0.0, 0.0, -5.0, -5.0, -5.0], "upper": [20.0, 20.0, 20.0, 5.0, 5.0, 5.0] },
            "control_space": { "lower": [-1.0, -1.0, -1.0], "upper": [1.0, 1.0, 1.0] },
        },
        "dynamics": { "model": "quadcopter_3d", "drag": drag },
        "regions": [{
            "name": "wall",
            "shape": { "type": "box", "lower": [wall_x, 0.0, 0.0], "upper": [20.0, 20.0, 20.0] },
            "labels": ["A"],
        }],
        "task": { "propositions": ["A"], "formula": "F(A)" },
        "initial": { "state": [1.0, 10.0, 10.0, 0.0, 0.0, 0.0] },
    });
    Scenario::from_json(&doc.to_string()).expect("quadcopter scenario is valid")
}

/// Root of a continuous `f` that is negative at `lo` and positive at `hi`.
pub fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
