//! The four benchmark scenarios shipped with the crate.

use crate::error::ScenarioError;
use crate::model::{Scenario, ScenarioFile};

pub const BUNDLED: [(&str, &str); 4] = [
    ("door_key", include_str!("../scenarios/door_key.json")),
    ("fork", include_str!("../scenarios/fork.json")),
    ("crs", include_str!("../scenarios/crs.json")),
    ("fire_detection", include_str!("../scenarios/fire_detection.json")),
];

pub fn names() -> impl Iterator<Item = &'static str> {
    BUNDLED.iter().map(|(n, _)| *n)
}

/// The raw file of a bundled scenario, for variants.
pub fn bundled_file(name: &str) -> Result<ScenarioFile, ScenarioError> {
    let (_, text) = BUNDLED
        .iter()
        .find(|(n, _)| *n == name)
        .ok_or_else(|| ScenarioError::UnknownBundled(name.to_string()))?;
    Ok(serde_json::from_str(text)?)
}

pub fn bundled(name: &str) -> Result<Scenario, ScenarioError> {
    Scenario::from_file(bundled_file(name)?)
}

/// Loads `spec` as a bundled name or, failing that, as a file path.
pub fn resolve(spec: &str) -> Result<Scenario, ScenarioError> {
    match bundled(spec) {
        Err(ScenarioError::UnknownBundled(_)) => Scenario::load(spec),
        other => other,
    }
}

/// The rock-sample scenario with different prior qualities for its rocks.
pub fn crs_with_prior(good: [f64; 3]) -> Result<Scenario, ScenarioError> {
    let mut f = bundled_file("crs")?;
    for (i, p) in good.iter().enumerate() {
        f.prior.independent.insert(format!("rock_{}.good", i + 1), *p);
    }
    Scenario::from_file(f)
}
